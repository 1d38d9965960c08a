#include "boundplan/planner/reference_path.hpp"

#include <algorithm>
#include <cmath>

namespace boundplan {
namespace {

// Ordered piece table of a (possibly blended) path.
struct Piece {
  double length = 0.0;
  bool is_blend = false;
  Vec3 start = Vec3::Zero();
  Vec3 dir = Vec3::UnitX();     // straight pieces
  const CornerBlend* blend = nullptr;
};

std::vector<Piece> build_pieces(const ReferencePath& path) {
  std::vector<Piece> pieces;
  const auto& p = path.via_points;
  Vec3 anchor = p.front();
  auto blend_for = [&](int via) -> const CornerBlend* {
    for (const auto& bl : path.smoothing)
      if (bl.via_index == via && bl.half_arc > 0.0) return &bl;
    return nullptr;
  };
  for (int j = 1; j < static_cast<int>(p.size()); ++j) {
    const CornerBlend* bl =
        (j + 1 < static_cast<int>(p.size())) ? blend_for(j) : nullptr;
    Vec3 end = bl ? Vec3(p[size_t(j)] - bl->trim * bl->u) : p[size_t(j)];
    Piece straight;
    straight.length = (end - anchor).norm();
    straight.start = anchor;
    straight.dir = straight.length > 1e-15
                       ? Vec3((end - anchor) / straight.length)
                       : Vec3::UnitX();
    pieces.push_back(straight);
    if (bl) {
      Piece curve;
      curve.is_blend = true;
      curve.length = 2.0 * bl->half_arc;
      curve.blend = bl;
      pieces.push_back(curve);
      anchor = p[size_t(j)] + bl->trim * bl->v;
    } else {
      anchor = p[size_t(j)];
    }
  }
  return pieces;
}

}  // namespace

int ReferencePath::segment_index(double phi) const {
  int n = segments();
  for (int i = 0; i < n; ++i)
    if (phi < knots[size_t(i + 1)]) return i;
  return n - 1;
}

Vec3 ReferencePath::position(double phi) const {
  phi = std::clamp(phi, knots.front(), knots.back());
  if (smoothing.empty()) {
    int i = segment_index(phi);
    double span = knots[size_t(i + 1)] - knots[size_t(i)];
    double tau = span > 1e-15 ? (phi - knots[size_t(i)]) / span : 1.0;
    return via_points[size_t(i)] +
           tau * (via_points[size_t(i + 1)] - via_points[size_t(i)]);
  }
  auto pieces = build_pieces(*this);
  double s = phi;
  for (const auto& piece : pieces) {
    if (s <= piece.length + 1e-15) {
      s = std::clamp(s, 0.0, piece.length);
      if (piece.is_blend) return blend_point(*piece.blend, s);
      return piece.start + s * piece.dir;
    }
    s -= piece.length;
  }
  return via_points.back();
}

Rotation ReferencePath::knot_rotation(int i) const {
  Rotation R = R0;
  for (int k = 0; k < i; ++k)
    R = rotation_exp(omega_ref, alphas[size_t(k)]) * R;
  return R;
}

Rotation ReferencePath::orientation(double phi) const {
  phi = std::clamp(phi, knots.front(), knots.back());
  int i = segment_index(phi);
  double span = knots[size_t(i + 1)] - knots[size_t(i)];
  double tau = span > 1e-15 ? (phi - knots[size_t(i)]) / span : 1.0;
  return rotation_exp(omega_ref, alphas[size_t(i)] * tau) * knot_rotation(i);
}

void ReferencePath::recompute_knots() {
  knots.assign(via_points.size(), 0.0);
  for (size_t i = 1; i < via_points.size(); ++i)
    knots[i] = knots[i - 1] + (via_points[i] - via_points[i - 1]).norm();
}

ReferencePath smooth_corners(
    const ReferencePath& path,
    const std::function<bool(int via_index, const Vec3&)>& inside,
    double extent_factor) {
  ReferencePath out = path;
  out.smoothing.clear();
  const auto& p = path.via_points;
  const int n = path.segments();
  for (int j = 1; j < n; ++j) {
    Vec3 din = p[size_t(j)] - p[size_t(j - 1)];
    Vec3 dout = p[size_t(j + 1)] - p[size_t(j)];
    double lin = din.norm(), lout = dout.norm();
    if (lin < 1e-12 || lout < 1e-12) continue;
    Vec3 u = din / lin, v = dout / lout;
    double trim = extent_factor * std::min(lin, lout);
    CornerBlend chosen = make_corner_blend(j, p[size_t(j)], u, v, 0.0);
    for (int attempt = 0; attempt < 14 && trim > 1e-12; ++attempt) {
      CornerBlend bl = make_corner_blend(j, p[size_t(j)], u, v, trim);
      if (bl.half_arc <= 0.0) break;
      bool ok = true;
      for (int k = 0; k < 200 && ok; ++k) {
        double s = 2.0 * bl.half_arc * (k + 0.5) / 200.0;
        ok = inside(j, blend_point(bl, s));
      }
      if (ok) {
        chosen = bl;
        break;
      }
      trim *= 0.5;
    }
    if (chosen.half_arc > 0.0) out.smoothing.push_back(chosen);
  }

  // Reparametrize phi to arc length over the blended curve; each interior
  // knot moves to its blend midpoint.
  if (!out.smoothing.empty()) {
    std::vector<double> knots(p.size(), 0.0);
    double arc = 0.0;
    Vec3 anchor = p.front();
    auto blend_for = [&](int via) -> const CornerBlend* {
      for (const auto& bl : out.smoothing)
        if (bl.via_index == via) return &bl;
      return nullptr;
    };
    for (int j = 1; j <= n; ++j) {
      const CornerBlend* bl = (j < n) ? blend_for(j) : nullptr;
      if (bl) {
        arc += (Vec3(p[size_t(j)] - bl->trim * bl->u) - anchor).norm() +
               bl->half_arc;
        knots[size_t(j)] = arc;
        arc += bl->half_arc;
        anchor = p[size_t(j)] + bl->trim * bl->v;
      } else {
        arc += (p[size_t(j)] - anchor).norm();
        knots[size_t(j)] = arc;
        anchor = p[size_t(j)];
      }
    }
    out.knots = knots;
  }
  return out;
}

}  // namespace boundplan
