#include "boundplan/io/scenario.hpp"

#include <fstream>
#include <set>

#include "boundplan/errors.hpp"

namespace boundplan {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidInput, "scenario field '" + field + "': " + why);
}

Vec3 read_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number())
    fail(field, "expected an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Pose read_pose(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  Pose pose;
  pose.position = read_vec3(j.value("position", json()), field + ".position");
  const json& q = j.value("quaternion", json());
  if (!q.is_array() || q.size() != 4 || !q[0].is_number())
    fail(field + ".quaternion", "expected an array of 4 numbers (w, x, y, z)");
  for (int k = 0; k < 4; ++k) pose.quaternion[k] = q[k].get<double>();
  if (std::abs(pose.quaternion.norm() - 1.0) > 1e-6)
    fail(field + ".quaternion", "not unit norm within 1e-6");
  return pose;
}

json pose_json(const Pose& p) {
  return json{{"position", vec3_json(p.position)},
              {"quaternion",
               json::array({p.quaternion[0], p.quaternion[1], p.quaternion[2],
                            p.quaternion[3]})}};
}

template <typename T>
T read_number(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(key, "expected a number");
  return obj[key].get<T>();
}

}  // namespace

Rotation Pose::rotation() const {
  Eigen::Quaterniond q(quaternion[0], quaternion[1], quaternion[2],
                       quaternion[3]);
  return Rotation(q.normalized().toRotationMatrix());
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    fail("schema_version", "missing or not an integer");
  Scenario s;
  s.schema_version = j["schema_version"].get<int>();
  if (s.schema_version != 1) fail("schema_version", "unsupported version");

  const json& dom = j.value("domain", json());
  if (!dom.is_object()) fail("domain", "expected an object with min/max");
  s.domain_min = read_vec3(dom.value("min", json()), "domain.min");
  s.domain_max = read_vec3(dom.value("max", json()), "domain.max");
  if (((s.domain_max - s.domain_min).array() <= 0.0).any())
    fail("domain", "max must exceed min on every axis");

  std::set<std::string> names;
  for (const json& jo : j.value("obstacles", json::array())) {
    NamedObstacle obs;
    obs.name = jo.value("name", std::string());
    if (obs.name.empty()) fail("obstacles[].name", "missing or empty");
    if (!names.insert(obs.name).second)
      fail("obstacles[].name", "duplicate name '" + obs.name + "'");
    const json& verts = jo.value("vertices", json());
    if (!verts.is_array() || verts.empty())
      fail("obstacles[].vertices", "expected a non-empty array");
    for (const json& v : verts)
      obs.vertices.push_back(read_vec3(v, "obstacles[].vertices[]"));
    s.obstacles.push_back(std::move(obs));
  }

  s.start = read_pose(j.value("start", json()), "start");
  s.goal = read_pose(j.value("goal", json()), "goal");

  s.ee_hull_offsets.clear();
  for (const json& v : j.value("ee_hull_offsets", json::array()))
    s.ee_hull_offsets.push_back(read_vec3(v, "ee_hull_offsets[]"));
  if (s.ee_hull_offsets.empty()) s.ee_hull_offsets.push_back(Vec3::Zero());

  for (const json& jc : j.value("collision_points", json::array())) {
    TrackedPoint tp;
    tp.offset = read_vec3(jc.value("offset", json()),
                          "collision_points[].offset");
    tp.margin = read_number<double>(jc, "margin", 0.0);
    if (tp.margin < 0.0) fail("collision_points[].margin", "negative margin");
    s.collision_points.push_back(tp);
  }

  const json& jp = j.value("planner", json::object());
  s.planner.c_bias = read_number<double>(jp, "c_bias", s.planner.c_bias);
  s.planner.w_size = read_number<double>(jp, "w_size", s.planner.w_size);
  s.planner.w_alpha = read_number<double>(jp, "w_alpha", s.planner.w_alpha);
  s.planner.obstacle_margin =
      read_number<double>(jp, "obstacle_margin", s.planner.obstacle_margin);
  s.planner.sample_budget =
      read_number<int>(jp, "sample_budget", s.planner.sample_budget);
  s.planner.rng_seed =
      read_number<std::uint64_t>(jp, "rng_seed", s.planner.rng_seed);
  s.planner.position_only = jp.value("position_only", s.planner.position_only);
  s.planner.smooth = jp.value("smooth", s.planner.smooth);

  const json& jt = j.value("tracker", json::object());
  s.tracker.horizon_steps =
      read_number<int>(jt, "horizon_steps", s.tracker.horizon_steps);
  s.tracker.dt = read_number<double>(jt, "dt", s.tracker.dt);
  s.tracker.v_max = read_number<double>(jt, "v_max", s.tracker.v_max);
  s.tracker.a_max = read_number<double>(jt, "a_max", s.tracker.a_max);
  s.tracker.eps_phi = read_number<double>(jt, "eps_phi", s.tracker.eps_phi);
  s.tracker.progress_weight =
      read_number<double>(jt, "progress_weight", s.tracker.progress_weight);
  s.tracker.deviation_weight =
      read_number<double>(jt, "deviation_weight", s.tracker.deviation_weight);
  if (s.tracker.horizon_steps < 2) fail("tracker.horizon_steps", "must be >= 2");
  if (s.tracker.dt <= 0.0) fail("tracker.dt", "must be > 0");
  if (s.tracker.v_max <= 0.0 || s.tracker.a_max <= 0.0)
    fail("tracker.v_max/a_max", "must be > 0");
  if (s.tracker.eps_phi < 0.0) fail("tracker.eps_phi", "must be >= 0");

  for (const json& je : j.value("replan_events", json::array())) {
    ReplanEvent ev;
    const json& trig = je.value("trigger", json());
    if (!trig.is_object() || (!trig.contains("time") && !trig.contains("phi")))
      fail("replan_events[].trigger", "expected an object with time or phi");
    if (trig.contains("time"))
      ev.trigger_time = read_number<double>(trig, "time", 0.0);
    if (trig.contains("phi"))
      ev.trigger_phi = read_number<double>(trig, "phi", 0.0);
    ev.goal = read_pose(je.value("goal", json()), "replan_events[].goal");
    s.replan_events.push_back(ev);
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["domain"] = {{"min", vec3_json(s.domain_min)},
                 {"max", vec3_json(s.domain_max)}};
  j["obstacles"] = json::array();
  for (const auto& obs : s.obstacles) {
    json verts = json::array();
    for (const Vec3& v : obs.vertices) verts.push_back(vec3_json(v));
    j["obstacles"].push_back({{"name", obs.name}, {"vertices", verts}});
  }
  j["start"] = pose_json(s.start);
  j["goal"] = pose_json(s.goal);
  j["ee_hull_offsets"] = json::array();
  for (const Vec3& v : s.ee_hull_offsets)
    j["ee_hull_offsets"].push_back(vec3_json(v));
  j["collision_points"] = json::array();
  for (const auto& tp : s.collision_points)
    j["collision_points"].push_back(
        {{"offset", vec3_json(tp.offset)}, {"margin", tp.margin}});
  j["planner"] = {{"c_bias", s.planner.c_bias},
                  {"w_size", s.planner.w_size},
                  {"w_alpha", s.planner.w_alpha},
                  {"obstacle_margin", s.planner.obstacle_margin},
                  {"sample_budget", s.planner.sample_budget},
                  {"rng_seed", s.planner.rng_seed},
                  {"position_only", s.planner.position_only},
                  {"smooth", s.planner.smooth}};
  j["tracker"] = {{"horizon_steps", s.tracker.horizon_steps},
                  {"dt", s.tracker.dt},
                  {"v_max", s.tracker.v_max},
                  {"a_max", s.tracker.a_max},
                  {"eps_phi", s.tracker.eps_phi},
                  {"progress_weight", s.tracker.progress_weight},
                  {"deviation_weight", s.tracker.deviation_weight}};
  j["replan_events"] = json::array();
  for (const auto& ev : s.replan_events) {
    json trig = json::object();
    if (ev.trigger_time) trig["time"] = *ev.trigger_time;
    if (ev.trigger_phi) trig["phi"] = *ev.trigger_phi;
    j["replan_events"].push_back({{"trigger", trig}, {"goal", pose_json(ev.goal)}});
  }
  return j;
}

Scenario load_scenario(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in)
    throw Error(ErrorCode::InvalidInput,
                "cannot open scenario file: " + file_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput,
                "scenario parse error in " + file_path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& file_path) {
  std::ofstream out(file_path);
  out << scenario_to_json(s).dump(2) << "\n";
}

std::string canonical_json(const std::string& text) {
  return json::parse(text).dump(2) + "\n";
}

Workspace make_workspace(const Scenario& s) {
  Workspace ws;
  ws.domain = ConvexPolytope::axis_aligned_box(s.domain_min, s.domain_max);
  for (const auto& obs : s.obstacles) ws.obstacles.emplace_back(obs.vertices);
  return ws;
}

PlanRequest make_plan_request(const Scenario& s) {
  PlanRequest req;
  req.p0 = s.start.position;
  req.R0 = s.start.rotation();
  req.pf = s.goal.position;
  req.Rf = s.goal.rotation();
  req.workspace = make_workspace(s);
  req.ee.hull_offsets = s.ee_hull_offsets;
  req.cost_params.c_bias = s.planner.c_bias;
  req.cost_params.w_size = s.planner.w_size;
  req.w_alpha = s.planner.w_alpha;
  req.inflation.obstacle_margin = s.planner.obstacle_margin;
  req.sample_budget = s.planner.sample_budget;
  req.rng_seed = s.planner.rng_seed;
  req.position_only = s.planner.position_only;
  req.smooth = s.planner.smooth;
  return req;
}

TrackerConfig make_tracker_config(const Scenario& s) {
  TrackerConfig cfg = s.tracker;
  cfg.ee.hull_offsets = s.ee_hull_offsets;
  cfg.collision_points = s.collision_points;
  return cfg;
}

}  // namespace boundplan
