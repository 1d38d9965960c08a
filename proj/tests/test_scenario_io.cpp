#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boundplan/errors.hpp"
#include "boundplan/io/artifact.hpp"
#include "boundplan/io/scenario.hpp"
#include "doctest.h"

using namespace boundplan;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scenarios_dir() {
  return fs::path(__FILE__).parent_path().parent_path() / "scenarios";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario bundled(const std::string& name) {
  return load_scenario((scenarios_dir() / name).string());
}

}  // namespace

TEST_CASE("canonical serialization is a fixed point") {
  for (const auto& name : {"empty.json", "open_box.json", "corridor.json",
                           "shelf_replan.json", "tight_corridor.json"}) {
    std::string raw = slurp(scenarios_dir() / name);
    std::string once = canonical_json(raw);
    CHECK(canonical_json(once) == once);
    // Parsing the canonical text yields the same scenario serialization.
    Scenario a = scenario_from_json(json::parse(raw));
    Scenario b = scenario_from_json(json::parse(once));
    CHECK(scenario_to_json(a).dump(2) == scenario_to_json(b).dump(2));
  }
}

TEST_CASE("scenario to-json from-json round trip") {
  Scenario s = bundled("shelf_replan.json");
  Scenario t = scenario_from_json(scenario_to_json(s));
  CHECK(scenario_to_json(t).dump(2) == scenario_to_json(s).dump(2));
  CHECK(t.obstacles.size() == s.obstacles.size());
  CHECK(t.replan_events.size() == 2);
  REQUIRE(t.replan_events[0].trigger_time.has_value());
  CHECK(*t.replan_events[0].trigger_time == doctest::Approx(1.2));
}

TEST_CASE("malformed quaternion is rejected naming the field") {
  json j = scenario_to_json(bundled("empty.json"));
  j["start"]["quaternion"] = {1.0, 0.5, 0.0, 0.0};  // not unit norm
  try {
    scenario_from_json(j);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
    CHECK(std::string(e.what()).find("quaternion") != std::string::npos);
  }
}

TEST_CASE("duplicate obstacle names are rejected") {
  json j = scenario_to_json(bundled("corridor.json"));
  j["obstacles"][1]["name"] = j["obstacles"][0]["name"];
  CHECK_THROWS_AS(scenario_from_json(j), Error);
}

TEST_CASE("missing schema version is rejected") {
  json j = scenario_to_json(bundled("empty.json"));
  j.erase("schema_version");
  try {
    scenario_from_json(j);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("schema_version") != std::string::npos);
  }
}

TEST_CASE("reference path survives JSON round trip exactly") {
  auto art = run_plan(bundled("open_box.json"));
  REQUIRE(art.metrics.failure.empty());
  ReferencePath back = path_from_json(path_to_json(art.path));
  REQUIRE(back.via_points.size() == art.path.via_points.size());
  for (int k = 0; k <= 100; ++k) {
    double phi = art.path.length() * k / 100.0;
    CHECK((back.position(phi) - art.path.position(phi)).norm() < 1e-12);
    CHECK((back.orientation(phi).matrix() - art.path.orientation(phi).matrix())
              .norm() < 1e-12);
  }
}

TEST_CASE("metrics are consistent with the emitted path") {
  auto art = run_plan(bundled("open_box.json"));
  REQUIRE(art.metrics.failure.empty());
  double len = 0.0;
  for (size_t i = 0; i + 1 < art.path.via_points.size(); ++i)
    len += (art.path.via_points[i + 1] - art.path.via_points[i]).norm();
  CHECK(std::abs(art.metrics.path_length_m - len) < 1e-9);
  double deg = 0.0;
  for (double a : art.path.alphas) deg += std::abs(a) * 180.0 / M_PI;
  CHECK(std::abs(art.metrics.orientation_length_deg - deg) < 1e-6);
}

TEST_CASE("artifact directory round trip") {
  auto art = run_track(bundled("corridor.json"), nullptr);
  REQUIRE(art.metrics.failure.empty());
  std::string dir = (fs::temp_directory_path() / "bp_artifact_rt").string();
  write_artifact(art, dir);
  RunArtifact back = read_artifact(dir);
  CHECK(path_to_json(back.path).dump() == path_to_json(art.path).dump());
  CHECK(sets_to_json(back.sets).dump() == sets_to_json(art.sets).dump());
  CHECK(trajectory_csv(back.trajectory) == trajectory_csv(art.trajectory));
  CHECK(metrics_to_json(back.metrics).dump() ==
        metrics_to_json(art.metrics).dump());
}

TEST_CASE("planning and tracking are deterministic for a fixed seed") {
  auto a = run_track(bundled("open_box.json"), nullptr);
  auto b = run_track(bundled("open_box.json"), nullptr);
  REQUIRE(a.metrics.failure.empty());
  CHECK(fnv1a(path_to_json(a.path).dump()) == fnv1a(path_to_json(b.path).dump()));
  CHECK(fnv1a(sets_to_json(a.sets).dump()) == fnv1a(sets_to_json(b.sets).dump()));
  CHECK(fnv1a(trajectory_csv(a.trajectory)) ==
        fnv1a(trajectory_csv(b.trajectory)));
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("plot data parses back and faces lie on set boundaries") {
  auto art = run_track(bundled("open_box.json"), nullptr);
  REQUIRE(art.metrics.failure.empty());
  std::string dir = (fs::temp_directory_path() / "bp_plot").string();
  emit_plot_data(art, dir);

  auto parse_rows = [](const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::vector<double> row;
      double x;
      while (ls >> x) row.push_back(x);
      rows.push_back(row);
    }
    return rows;
  };

  auto ref = parse_rows(slurp(fs::path(dir) / "reference_polyline.txt"));
  CHECK(ref.size() == 401);
  for (const auto& row : ref) CHECK(row.size() == 3);
  // Lossless round trip of the sampled reference.
  for (size_t k = 0; k < ref.size(); ++k) {
    Vec3 p = art.path.position(art.path.length() * double(k) / 400.0);
    CHECK((p - Vec3(ref[k][0], ref[k][1], ref[k][2])).norm() == 0.0);
  }

  auto traj = parse_rows(slurp(fs::path(dir) / "trajectory_polyline.txt"));
  CHECK(traj.size() == art.trajectory.size());

  auto faces = parse_rows(slurp(fs::path(dir) / "set_faces.txt"));
  CHECK(!faces.empty());
  for (const auto& row : faces) {
    REQUIRE(row.size() % 3 == 0);
    // Every vertex of the face lies on one common half-space boundary of
    // one of the sets.
    bool on_boundary = false;
    for (const auto& poly : art.sets) {
      for (int r = 0; r < poly.rows(); ++r) {
        bool all_on = true;
        for (size_t v = 0; v + 2 < row.size(); v += 3) {
          Vec3 p(row[v], row[v + 1], row[v + 2]);
          if (std::abs(poly.A().row(r).dot(p) - poly.b()[r]) > 1e-9)
            all_on = false;
        }
        if (all_on) on_boundary = true;
      }
    }
    CHECK(on_boundary);
  }

  auto obs = parse_rows(slurp(fs::path(dir) / "obstacle_faces.txt"));
  CHECK(obs.size() == 6 * art.scenario.obstacles.size());  // box faces
}

TEST_CASE("empty obstacle list produces an empty but valid faces file") {
  auto art = run_track(bundled("empty.json"), nullptr);
  REQUIRE(art.metrics.failure.empty());
  std::string dir = (fs::temp_directory_path() / "bp_plot_empty").string();
  emit_plot_data(art, dir);
  CHECK(slurp(fs::path(dir) / "obstacle_faces.txt").empty());
}

TEST_CASE("empty workspace tracks straight to the goal") {
  auto art = run_track(bundled("empty.json"), nullptr);
  REQUIRE(art.metrics.failure.empty());
  CHECK(art.path.segments() <= 2);
  CHECK(art.metrics.collisions == 0);
  Vec3 goal = art.scenario.goal.position;
  CHECK((art.trajectory.back().position - goal).norm() < 2e-3);
}

TEST_CASE("infeasibly tight corridor surfaces a planner failure") {
  auto art = run_plan(bundled("tight_corridor.json"));
  CHECK(!art.metrics.failure.empty());
  CHECK(art.path.via_points.empty());
}

TEST_CASE("shelf scenario applies both replan events without collisions") {
  auto art = run_track(bundled("shelf_replan.json"), nullptr);
  REQUIRE(art.metrics.failure.empty());
  CHECK(art.metrics.replan_times_s.size() >= 2);
  CHECK(art.metrics.collisions == 0);
  Vec3 goal(0.85, -0.1, 0.3);  // final replan goal
  CHECK((art.trajectory.back().position - goal).norm() < 2e-3);
  // Velocity continuity across replans.
  const auto& log = art.trajectory;
  const Scenario& s = art.scenario;
  for (size_t k = 1; k < log.size(); ++k)
    CHECK((log[k].velocity - log[k - 1].velocity).cwiseAbs().maxCoeff() <=
          s.tracker.a_max * s.tracker.dt + 1e-7);
}
