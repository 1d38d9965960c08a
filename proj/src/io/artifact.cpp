#include "boundplan/io/artifact.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boundplan/errors.hpp"
#include "boundplan/io/log.hpp"

namespace boundplan {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write: " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double wall_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.plan_time_s = j.value("plan_time_s", 0.0);
  m.path_length_m = j.value("path_length_m", 0.0);
  m.orientation_length_deg = j.value("orientation_length_deg", 0.0);
  m.traj_duration_s = j.value("traj_duration_s", 0.0);
  for (const json& t : j.value("replan_times_s", json::array()))
    m.replan_times_s.push_back(t.get<double>());
  m.degraded_steps = j.value("degraded_steps", 0);
  m.collisions = j.value("collisions", 0);
  m.failure = j.value("failure", std::string());
  return m;
}

void fill_path_metrics(RunArtifact& art) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < art.path.via_points.size(); ++i)
    len += (art.path.via_points[i + 1] - art.path.via_points[i]).norm();
  art.metrics.path_length_m = len;
  double ang = 0.0;
  for (double a : art.path.alphas) ang += std::abs(a);
  art.metrics.orientation_length_deg = ang * 180.0 / M_PI;
}

}  // namespace

json path_to_json(const ReferencePath& path) {
  json j;
  j["via_points"] = json::array();
  for (const Vec3& p : path.via_points) j["via_points"].push_back(vec3_json(p));
  j["knots"] = path.knots;
  j["omega_ref"] = vec3_json(path.omega_ref);
  j["alphas"] = path.alphas;
  j["R0"] = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) j["R0"].push_back(path.R0.matrix()(r, c));
  j["set_sequence"] = path.set_sequence;
  j["blends"] = json::array();
  for (const auto& bl : path.smoothing)
    j["blends"].push_back({{"via_index", bl.via_index},
                           {"corner", vec3_json(bl.corner)},
                           {"u", vec3_json(bl.u)},
                           {"v", vec3_json(bl.v)},
                           {"trim", bl.trim},
                           {"half_arc", bl.half_arc},
                           {"turn", bl.turn}});
  return j;
}

ReferencePath path_from_json(const json& j) {
  ReferencePath path;
  for (const json& p : j.at("via_points")) path.via_points.push_back(vec3_from(p));
  path.knots = j.at("knots").get<std::vector<double>>();
  path.omega_ref = vec3_from(j.at("omega_ref"));
  path.alphas = j.at("alphas").get<std::vector<double>>();
  Mat3 R;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) R(r, c) = j.at("R0")[size_t(3 * r + c)].get<double>();
  path.R0 = Rotation(R);
  path.set_sequence = j.at("set_sequence").get<std::vector<int>>();
  for (const json& jb : j.value("blends", json::array())) {
    CornerBlend bl;
    bl.via_index = jb.at("via_index").get<int>();
    bl.corner = vec3_from(jb.at("corner"));
    bl.u = vec3_from(jb.at("u"));
    bl.v = vec3_from(jb.at("v"));
    bl.trim = jb.at("trim").get<double>();
    bl.half_arc = jb.at("half_arc").get<double>();
    bl.turn = jb.at("turn").get<double>();
    path.smoothing.push_back(bl);
  }
  return path;
}

json sets_to_json(const std::vector<ConvexPolytope>& sets) {
  json j = json::array();
  for (const auto& poly : sets) {
    json rows = json::array();
    for (int r = 0; r < poly.rows(); ++r)
      rows.push_back(json::array({poly.A()(r, 0), poly.A()(r, 1),
                                  poly.A()(r, 2), poly.b()[r]}));
    j.push_back({{"rows", rows}});
  }
  return j;
}

std::vector<ConvexPolytope> sets_from_json(const json& j) {
  std::vector<ConvexPolytope> sets;
  for (const json& js : j) {
    const json& rows = js.at("rows");
    Eigen::MatrixX3d A(rows.size(), 3);
    VecX b(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      A(static_cast<int>(r), 0) = rows[r][0].get<double>();
      A(static_cast<int>(r), 1) = rows[r][1].get<double>();
      A(static_cast<int>(r), 2) = rows[r][2].get<double>();
      b[static_cast<int>(r)] = rows[r][3].get<double>();
    }
    sets.emplace_back(A, b);
  }
  return sets;
}

json metrics_to_json(const Metrics& m) {
  return json{{"plan_time_s", m.plan_time_s},
              {"path_length_m", m.path_length_m},
              {"orientation_length_deg", m.orientation_length_deg},
              {"traj_duration_s", m.traj_duration_s},
              {"replan_times_s", m.replan_times_s},
              {"degraded_steps", m.degraded_steps},
              {"collisions", m.collisions},
              {"failure", m.failure}};
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& log) {
  std::ostringstream out;
  out << "t,px,py,pz,vx,vy,vz,phi,set_id,degraded\n";
  for (const auto& r : log) {
    out << fmt(r.t);
    for (int k = 0; k < 3; ++k) out << "," << fmt(r.position[k]);
    for (int k = 0; k < 3; ++k) out << "," << fmt(r.velocity[k]);
    out << "," << fmt(r.phi) << "," << r.set_id << "," << (r.degraded ? 1 : 0)
        << "\n";
  }
  return out.str();
}

std::vector<TrajectoryRecord> trajectory_from_csv(const std::string& text) {
  std::vector<TrajectoryRecord> log;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajectoryRecord r;
    std::istringstream ls(line);
    std::string cell;
    auto next = [&] {
      std::getline(ls, cell, ',');
      return cell;
    };
    r.t = std::stod(next());
    for (int k = 0; k < 3; ++k) r.position[k] = std::stod(next());
    for (int k = 0; k < 3; ++k) r.velocity[k] = std::stod(next());
    r.phi = std::stod(next());
    r.set_id = std::stoi(next());
    r.degraded = std::stoi(next()) != 0;
    log.push_back(r);
  }
  return log;
}

void write_artifact(const RunArtifact& artifact, const std::string& dir) {
  fs::create_directories(dir);
  write_file(dir + "/scenario.json",
             scenario_to_json(artifact.scenario).dump(2) + "\n");
  write_file(dir + "/path.json", path_to_json(artifact.path).dump(2) + "\n");
  write_file(dir + "/sets.json", sets_to_json(artifact.sets).dump(2) + "\n");
  write_file(dir + "/graph.json", artifact.graph.dump(2) + "\n");
  write_file(dir + "/metrics.json",
             metrics_to_json(artifact.metrics).dump(2) + "\n");
  write_file(dir + "/trajectory.csv", trajectory_csv(artifact.trajectory));
}

RunArtifact read_artifact(const std::string& dir) {
  RunArtifact art;
  art.scenario = scenario_from_json(json::parse(read_file(dir + "/scenario.json")));
  art.path = path_from_json(json::parse(read_file(dir + "/path.json")));
  art.sets = sets_from_json(json::parse(read_file(dir + "/sets.json")));
  art.graph = json::parse(read_file(dir + "/graph.json"));
  art.metrics = metrics_from_json(json::parse(read_file(dir + "/metrics.json")));
  art.trajectory = trajectory_from_csv(read_file(dir + "/trajectory.csv"));
  return art;
}

std::vector<Vec3> polytope_vertices(const ConvexPolytope& poly) {
  std::vector<Vec3> verts;
  const int n = poly.rows();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        Mat3 M;
        M.row(0) = poly.A().row(a);
        M.row(1) = poly.A().row(b);
        M.row(2) = poly.A().row(c);
        if (std::abs(M.determinant()) < 1e-10) continue;
        Vec3 x = M.partialPivLu().solve(Vec3(poly.b()[a], poly.b()[b],
                                             poly.b()[c]));
        if (!poly.contains(x, 1e-7)) continue;
        bool dup = false;
        for (const Vec3& v : verts)
          if ((v - x).norm() < 1e-7) {
            dup = true;
            break;
          }
        if (!dup) verts.push_back(x);
      }
  return verts;
}

namespace {

// Orders coplanar points counterclockwise around their centroid in the
// plane with outward normal n.
std::vector<Vec3> order_face(std::vector<Vec3> pts, const Vec3& n) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : pts) centroid += p;
  centroid /= double(pts.size());
  Vec3 e1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY());
  e1 = (e1 - e1.dot(n) * n).normalized();
  Vec3 e2 = n.cross(e1);
  std::sort(pts.begin(), pts.end(), [&](const Vec3& a, const Vec3& b) {
    Vec3 da = a - centroid, db = b - centroid;
    return std::atan2(da.dot(e2), da.dot(e1)) <
           std::atan2(db.dot(e2), db.dot(e1));
  });
  return pts;
}

}  // namespace

std::vector<std::vector<Vec3>> polytope_faces(const ConvexPolytope& poly) {
  std::vector<std::vector<Vec3>> faces;
  auto verts = polytope_vertices(poly);
  for (int r = 0; r < poly.rows(); ++r) {
    std::vector<Vec3> on_plane;
    for (const Vec3& v : verts)
      if (std::abs(poly.A().row(r).dot(v) - poly.b()[r]) < 1e-7)
        on_plane.push_back(v);
    if (on_plane.size() >= 3)
      faces.push_back(order_face(on_plane, poly.A().row(r).transpose()));
  }
  return faces;
}

std::vector<std::vector<Vec3>> hull_faces(const ConvexBody& body) {
  const auto& verts = body.vertices();
  const int n = body.size();
  std::vector<std::vector<Vec3>> faces;
  std::vector<Vec3> normals;
  std::vector<double> offsets;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        Vec3 nrm = (verts[size_t(b)] - verts[size_t(a)])
                       .cross(verts[size_t(c)] - verts[size_t(a)]);
        if (nrm.norm() < 1e-12) continue;
        nrm.normalize();
        double off = nrm.dot(verts[size_t(a)]);
        int below = 0, above = 0;
        for (const Vec3& v : verts) {
          double d = nrm.dot(v) - off;
          if (d > 1e-9) ++above;
          if (d < -1e-9) ++below;
        }
        if (above > 0 && below > 0) continue;
        if (above > 0) {
          nrm = -nrm;
          off = -off;
        }
        bool dup = false;
        for (size_t k = 0; k < normals.size(); ++k)
          if ((normals[k] - nrm).norm() < 1e-9 &&
              std::abs(offsets[k] - off) < 1e-9) {
            dup = true;
            break;
          }
        if (dup) continue;
        normals.push_back(nrm);
        offsets.push_back(off);
        std::vector<Vec3> on_plane;
        for (const Vec3& v : verts)
          if (std::abs(nrm.dot(v) - off) < 1e-9) on_plane.push_back(v);
        if (on_plane.size() >= 3) faces.push_back(order_face(on_plane, nrm));
      }
  return faces;
}

namespace {

std::string polyline_text(const std::vector<Vec3>& pts) {
  std::ostringstream out;
  for (const Vec3& p : pts)
    out << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << "\n";
  return out.str();
}

std::string faces_text(const std::vector<std::vector<Vec3>>& faces) {
  std::ostringstream out;
  for (const auto& face : faces) {
    for (size_t k = 0; k < face.size(); ++k) {
      if (k) out << " ";
      out << fmt(face[k].x()) << " " << fmt(face[k].y()) << " "
          << fmt(face[k].z());
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

void emit_plot_data(const RunArtifact& artifact, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<Vec3> ref;
  if (artifact.path.segments() >= 1) {
    const int samples = 400;
    for (int k = 0; k <= samples; ++k)
      ref.push_back(
          artifact.path.position(artifact.path.length() * k / samples));
  }
  write_file(dir + "/reference_polyline.txt", polyline_text(ref));

  std::vector<Vec3> traj;
  for (const auto& r : artifact.trajectory) traj.push_back(r.position);
  write_file(dir + "/trajectory_polyline.txt", polyline_text(traj));

  std::vector<std::vector<Vec3>> obs_faces;
  for (const auto& obs : artifact.scenario.obstacles) {
    ConvexBody body(obs.vertices);
    for (auto& f : hull_faces(body)) obs_faces.push_back(std::move(f));
  }
  write_file(dir + "/obstacle_faces.txt", faces_text(obs_faces));

  std::vector<std::vector<Vec3>> set_faces;
  for (const auto& poly : artifact.sets)
    for (auto& f : polytope_faces(poly)) set_faces.push_back(std::move(f));
  write_file(dir + "/set_faces.txt", faces_text(set_faces));
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

RunArtifact run_plan(const Scenario& scenario, const RunOptions& opt) {
  RunArtifact art;
  art.scenario = scenario;
  art.graph = json::object();
  PlanRequest req = make_plan_request(scenario);
  double t0 = wall_seconds();
  try {
    PlanResult res = plan(req);
    art.metrics.plan_time_s = wall_seconds() - t0;
    art.path = res.path;
    art.sets = path_sets(res.path, res.graph);
    if (opt.dump_graph) art.graph = res.graph.to_json();
    fill_path_metrics(art);
    log_info("plan: " + std::to_string(art.sets.size()) + " sets, length " +
             std::to_string(art.metrics.path_length_m));
  } catch (const Error& e) {
    art.metrics.plan_time_s = wall_seconds() - t0;
    art.metrics.failure = error_name(e.code());
    log_info(std::string("plan failed: ") + e.what());
  }
  return art;
}

RunArtifact run_track(const Scenario& scenario, const RunArtifact* planned,
                      const RunOptions& opt) {
  RunArtifact art = planned ? *planned : run_plan(scenario, opt);
  art.scenario = scenario;
  if (!art.metrics.failure.empty()) return art;

  Workspace ws = make_workspace(scenario);
  TrackerConfig cfg = make_tracker_config(scenario);
  ReferencePath path = art.path;
  std::vector<ConvexPolytope> sets = art.sets;
  TrackerState state =
      make_tracker_state(scenario.start.position, Vec3::Zero(), path, cfg);

  std::vector<bool> applied(scenario.replan_events.size(), false);
  double t_max = 4.0 * path.length() / cfg.v_max + 10.0;
  Pose current_goal = scenario.goal;
  int recovery_attempts = 0;
  try {
    while (true) {
      for (size_t e = 0; e < scenario.replan_events.size(); ++e) {
        const auto& ev = scenario.replan_events[e];
        if (applied[e]) continue;
        bool fire = (ev.trigger_time && state.time >= *ev.trigger_time) ||
                    (ev.trigger_phi && state.phi >= *ev.trigger_phi);
        if (!fire) continue;
        applied[e] = true;
        current_goal = ev.goal;
        PlanRequest req = make_plan_request(scenario);
        req.pf = ev.goal.position;
        req.Rf = ev.goal.rotation();
        double t0 = wall_seconds();
        ReplanOutcome outcome = replan(state, path, sets, req);
        art.metrics.replan_times_s.push_back(wall_seconds() - t0);
        path = outcome.path;
        sets = path_sets(path, outcome.plan_result.graph);
        t_max = state.time + 4.0 * path.length() / cfg.v_max + 10.0;
        log_info("replan at t=" + std::to_string(state.time) +
                 (outcome.cold ? " (cold)" : ""));
      }

      StepResult res;
      try {
        res = step(state, path, sets, ws, cfg);
        recovery_attempts = 0;
      } catch (const Error& e) {
        // A predicted collision triggers a replan toward the current goal.
        if (e.code() != ErrorCode::PredictedCollision ||
            ++recovery_attempts > 5)
          throw;
        // Collapse the stale horizon so the recovery replans from the
        // current position rather than around the offending chord.
        std::fill(state.horizon.begin(), state.horizon.end(), state.position);
        std::fill(state.horizon_phi.begin(), state.horizon_phi.end(),
                  state.phi);
        PlanRequest req = make_plan_request(scenario);
        req.pf = current_goal.position;
        req.Rf = current_goal.rotation();
        double t0 = wall_seconds();
        ReplanOutcome outcome = replan(state, path, sets, req);
        art.metrics.replan_times_s.push_back(wall_seconds() - t0);
        path = outcome.path;
        sets = path_sets(path, outcome.plan_result.graph);
        t_max = state.time + 4.0 * path.length() / cfg.v_max + 10.0;
        continue;
      }
      if (res.degraded) ++art.metrics.degraded_steps;

      TrajectoryRecord rec;
      rec.t = state.time;
      rec.position = state.position;
      rec.velocity = state.velocity;
      rec.phi = state.phi;
      rec.set_id = path.set_sequence[size_t(state.active_segment)];
      rec.degraded = res.degraded;
      art.trajectory.push_back(rec);

      Rotation R = path.orientation(state.phi);
      for (const auto& tp : cfg.collision_points) {
        Vec3 pc = state.position + R * tp.offset;
        for (const auto& obs : ws.obstacles)
          if (closest_points(ConvexBody({pc}), obs).distance <
              tp.margin - 1e-9)
            ++art.metrics.collisions;
      }

      bool events_done = true;
      for (size_t e = 0; e < applied.size(); ++e)
        if (!applied[e]) events_done = false;
      if (events_done && state.phi >= path.length() - 1e-3 &&
          state.velocity.norm() < 1e-3 &&
          (state.position - path.position(path.length())).norm() < 8e-4)
        break;
      if (state.time > t_max) {
        art.metrics.failure = "Timeout";
        break;
      }
    }
  } catch (const Error& e) {
    art.metrics.failure = error_name(e.code());
    log_info(std::string("track failed: ") + e.what());
  }
  art.metrics.traj_duration_s = state.time;
  art.path = path;
  art.sets = sets;
  fill_path_metrics(art);
  return art;
}

}  // namespace boundplan
