#pragma once

#include <vector>

#include "boundplan/geometry/polytope.hpp"
#include "boundplan/planner/reference_path.hpp"

namespace boundplan {

// True iff the whole hull fits inside the polytope at some position for at
// least one probe orientation.
bool ee_fits(const ConvexPolytope& poly, const EndEffectorModel& ee,
             const std::vector<Rotation>& probes);

// Minimizer of a^T p_el(pi_p(phi), pi_o(phi)) - b over segment i's phi
// interval. The distance is unimodal per half-space (circular arc plus a
// linear drift), located by a coarse grid plus golden-section refinement.
double phi_min(int segment, int hull_index, const Vec3& a, double b,
               const EndEffectorModel& ee, const ReferencePath& path);

struct PathOptConfig {
  double w_alpha = 0.1;
  int max_outer = 20;
  double via_tol = 1e-5;     // meters, convergence of via displacement
  bool position_only = false;
};

struct PathOptResult {
  ReferencePath path;
  bool max_iter_reached = false;
  bool descent_violation = false;  // objective increased beyond 1e-9
  double objective = 0.0;
  int outer_iterations = 0;
};

// Shortest path of via-points and rotation magnitudes through the given set
// sequence: minimizes sum_i c_i (||p_{i+1}-p_i||^2 + w_alpha (da_i)^2) with
// the hull contained in each segment's set. Containment over continuous phi
// is enforced at the per-halfspace minimizers, re-anchored in an outer loop,
// with a dense verification sweep afterwards.
PathOptResult optimize_path(const std::vector<ConvexPolytope>& sets,
                            const std::vector<double>& size_costs,
                            const std::vector<int>& set_ids, const Vec3& p0,
                            const Rotation& R0, const Vec3& pf,
                            const Rotation& Rf, const EndEffectorModel& ee,
                            const PathOptConfig& cfg = {});

}  // namespace boundplan
