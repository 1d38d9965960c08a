#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "boundplan/io/artifact.hpp"
#include "boundplan/io/log.hpp"

namespace fs = std::filesystem;
using namespace boundplan;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitPlanner = 2;
constexpr int kExitTracking = 3;

// Expands a glob of the form dir/prefix*suffix (single '*', last component).
std::vector<std::string> expand_glob(const std::string& pattern) {
  std::vector<std::string> out;
  fs::path p(pattern);
  std::string leaf = p.filename().string();
  auto star = leaf.find('*');
  if (star == std::string::npos) {
    if (fs::exists(p)) out.push_back(p.string());
    return out;
  }
  std::string prefix = leaf.substr(0, star);
  std::string suffix = leaf.substr(star + 1);
  fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() &&
        name.compare(0, prefix.size(), prefix) == 0 &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_plan_cmd(const std::string& scenario_file, const std::string& out_dir,
                 long long seed, bool dump_graph, bool position_only) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_file);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  if (seed >= 0) scenario.planner.rng_seed = static_cast<std::uint64_t>(seed);
  if (position_only) scenario.planner.position_only = true;
  RunOptions opt;
  opt.dump_graph = dump_graph;
  RunArtifact art = run_plan(scenario, opt);
  write_artifact(art, out_dir);
  if (!art.metrics.failure.empty()) {
    std::cerr << "planner error: " << art.metrics.failure << "\n";
    return kExitPlanner;
  }
  std::cout << "planned " << art.sets.size() << " sets, path length "
            << art.metrics.path_length_m << " m, plan time "
            << art.metrics.plan_time_s << " s\n";
  return kExitOk;
}

int run_track_cmd(const std::string& scenario_file,
                  const std::string& path_file, const std::string& out_dir,
                  long long seed) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_file);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  if (seed >= 0) scenario.planner.rng_seed = static_cast<std::uint64_t>(seed);

  RunArtifact art;
  if (!path_file.empty()) {
    RunArtifact planned;
    planned.scenario = scenario;
    try {
      std::ifstream in(path_file);
      if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path_file);
      json j;
      in >> j;
      planned.path = path_from_json(j.at("path"));
      planned.sets = sets_from_json(j.at("sets"));
      planned.graph = json::object();
    } catch (const std::exception& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return kExitInput;
    }
    art = run_track(scenario, &planned);
  } else {
    art = run_track(scenario, nullptr);
  }
  write_artifact(art, out_dir);
  if (art.metrics.failure == error_name(ErrorCode::TunnelViolation)) {
    std::cerr << "tracking violation at step " << art.trajectory.size() << "\n";
    return kExitTracking;
  }
  if (!art.metrics.failure.empty()) {
    std::cerr << "planner error: " << art.metrics.failure << "\n";
    return kExitPlanner;
  }
  std::cout << "tracked to goal in " << art.metrics.traj_duration_s
            << " s, collisions " << art.metrics.collisions << ", degraded "
            << art.metrics.degraded_steps << ", replans "
            << art.metrics.replan_times_s.size() << "\n";
  return kExitOk;
}

struct Aggregate {
  double min_plan = 0, avg_plan = 0, max_plan = 0;
  double min_len = 0, avg_len = 0, max_len = 0;
  double min_traj = 0, avg_traj = 0, max_traj = 0;
  int failures = 0;
  int reps = 0;
};

int run_bench_cmd(const std::string& pattern, int reps,
                  const std::string& out_dir) {
  auto files = expand_glob(pattern);
  if (files.empty()) {
    std::cerr << "input error: no scenarios match " << pattern << "\n";
    return kExitInput;
  }
  json report;
  report["scenarios"] = json::array();
  std::printf("%-28s %4s %9s %9s %9s %9s %5s\n", "scenario", "reps",
              "min_plan", "avg_plan", "max_plan", "avg_traj", "fail");
  for (const auto& file : files) {
    Scenario scenario;
    try {
      scenario = load_scenario(file);
    } catch (const Error& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return kExitInput;
    }
    Aggregate agg;
    agg.reps = reps;
    std::vector<double> plans, lens, trajs;
    for (int r = 0; r < reps; ++r) {
      Scenario run = scenario;
      run.planner.rng_seed = scenario.planner.rng_seed + std::uint64_t(r);
      RunArtifact art = run_track(run, nullptr);
      if (!art.metrics.failure.empty() || art.metrics.collisions > 0) {
        ++agg.failures;
        continue;
      }
      plans.push_back(art.metrics.plan_time_s);
      lens.push_back(art.metrics.path_length_m);
      trajs.push_back(art.metrics.traj_duration_s);
    }
    auto stats = [](const std::vector<double>& v, double& lo, double& avg,
                    double& hi) {
      if (v.empty()) return;
      lo = *std::min_element(v.begin(), v.end());
      hi = *std::max_element(v.begin(), v.end());
      avg = 0;
      for (double x : v) avg += x;
      avg /= double(v.size());
    };
    stats(plans, agg.min_plan, agg.avg_plan, agg.max_plan);
    stats(lens, agg.min_len, agg.avg_len, agg.max_len);
    stats(trajs, agg.min_traj, agg.avg_traj, agg.max_traj);
    std::string name = fs::path(file).filename().string();
    std::printf("%-28s %4d %9.4f %9.4f %9.4f %9.3f %5d\n", name.c_str(), reps,
                agg.min_plan, agg.avg_plan, agg.max_plan, agg.avg_traj,
                agg.failures);
    report["scenarios"].push_back(
        {{"name", name},
         {"reps", reps},
         {"failures", agg.failures},
         {"path_length_m",
          {{"min", agg.min_len}, {"avg", agg.avg_len}, {"max", agg.max_len}}},
         {"traj_duration_s",
          {{"min", agg.min_traj},
           {"avg", agg.avg_traj},
           {"max", agg.max_traj}}}});
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir + "/bench.json");
    out << report.dump(2) << "\n";
  }
  return kExitOk;
}

int run_plot_cmd(const std::string& artifact_dir) {
  try {
    RunArtifact art = read_artifact(artifact_dir);
    emit_plot_data(art, artifact_dir + "/plot");
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  std::cout << "plot data written to " << artifact_dir << "/plot\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded reference-path planning and tunnel tracking"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir = "out", path_file, pattern, artifact_dir;
  long long seed = -1;
  int reps = 1;
  bool dump_graph = false, position_only = false;

  auto* plan_cmd = app.add_subcommand("plan", "Plan a reference path");
  plan_cmd->add_option("scenario", scenario_file)->required();
  plan_cmd->add_option("--out", out_dir);
  plan_cmd->add_option("--seed", seed);
  plan_cmd->add_flag("--dump-graph", dump_graph);
  plan_cmd->add_flag("--position-only", position_only);

  auto* track_cmd = app.add_subcommand("track", "Plan and track in closed loop");
  track_cmd->add_option("scenario", scenario_file)->required();
  track_cmd->add_option("--path", path_file);
  track_cmd->add_option("--out", out_dir);
  track_cmd->add_option("--seed", seed);

  auto* bench_cmd = app.add_subcommand("bench", "Benchmark scenario files");
  bench_cmd->add_option("glob", pattern)->required();
  bench_cmd->add_option("--reps", reps);
  bench_cmd->add_option("--out", out_dir);

  auto* plot_cmd = app.add_subcommand("plot", "Emit plot data from an artifact");
  plot_cmd->add_option("artifact", artifact_dir)->required();

  CLI11_PARSE(app, argc, argv);

  if (plan_cmd->parsed())
    return run_plan_cmd(scenario_file, out_dir, seed, dump_graph,
                        position_only);
  if (track_cmd->parsed())
    return run_track_cmd(scenario_file, path_file, out_dir, seed);
  if (bench_cmd->parsed()) return run_bench_cmd(pattern, reps, out_dir);
  if (plot_cmd->parsed()) return run_plot_cmd(artifact_dir);
  return kExitInput;
}
