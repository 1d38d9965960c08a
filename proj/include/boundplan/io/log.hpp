#pragma once

#include <string>

namespace boundplan {

enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

// Parsed once from BOUNDPLAN_LOG (off|info|debug); unset means off.
LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace boundplan
