#include "boundplan/io/log.hpp"

#include <cstdlib>
#include <iostream>

namespace boundplan {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("BOUNDPLAN_LOG");
    if (!env) return LogLevel::Off;
    std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Off;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace boundplan
