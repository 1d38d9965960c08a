#include "boundplan/planner/clothoid.hpp"

#include <algorithm>
#include <cmath>

namespace boundplan {
namespace {

// 20-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGl = 20;
const double kGlX[kGl] = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
    -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
    -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
    -0.0765265211334973, 0.0765265211334973,  0.2277858511416451,
    0.3737060887154195,  0.5108670019508271,  0.6360536807265150,
    0.7463319064601508,  0.8391169718222188,  0.9122344282513259,
    0.9639719272779138,  0.9931285991850949};
const double kGlW[kGl] = {
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
    0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
    0.1527533871307258, 0.1527533871307258, 0.1491729864726037,
    0.1420961093183820, 0.1316886384491766, 0.1181945319615184,
    0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

}  // namespace

FresnelPair fresnel(double k, double s) {
  // Composite Gauss-Legendre; panel count grows with the phase range so the
  // quadrature stays far below 1e-9 error.
  double phase = std::abs(k) * s * s;
  int panels = 1 + static_cast<int>(phase / 1.5);
  FresnelPair out;
  double left = 0.0;
  double width = s / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = left + 0.5 * width;
    for (int i = 0; i < kGl; ++i) {
      double t = mid + 0.5 * width * kGlX[i];
      double w = 0.5 * width * kGlW[i];
      out.c += w * std::cos(k * t * t);
      out.s += w * std::sin(k * t * t);
    }
    left += width;
  }
  return out;
}

CornerBlend make_corner_blend(int via_index, const Vec3& corner,
                              const Vec3& u, const Vec3& v, double trim) {
  CornerBlend blend;
  blend.via_index = via_index;
  blend.corner = corner;
  blend.u = u;
  blend.v = v;
  blend.trim = trim;
  double c = std::clamp(u.dot(v), -1.0, 1.0);
  blend.turn = std::acos(c);
  if (blend.turn < 1e-12 || blend.turn > M_PI - 1e-6 || trim <= 0.0) {
    blend.trim = 0.0;
    blend.half_arc = 0.0;
    return blend;
  }
  // Unit-arc spiral turning turn/2: endpoint offsets scale linearly with
  // the arc length, so the trim fixes the half arc in closed form.
  double k = 0.5 * blend.turn;  // theta(t) = k t^2 on the unit spiral
  FresnelPair f = fresnel(k, 1.0);
  double denom = f.c + f.s * std::tan(0.5 * blend.turn);
  blend.half_arc = trim / denom;
  return blend;
}

Vec3 blend_point(const CornerBlend& blend, double s) {
  if (blend.half_arc <= 0.0) return blend.corner;
  const double k = 0.5 * blend.turn / (blend.half_arc * blend.half_arc);
  Vec3 n = (blend.v - blend.u.dot(blend.v) * blend.u).normalized();
  auto first_half = [&](double t) -> Vec3 {
    FresnelPair f = fresnel(k, t);
    return blend.corner - blend.trim * blend.u + f.c * blend.u + f.s * n;
  };
  if (s <= blend.half_arc) return first_half(s);
  // Second half: mirror of the first across the corner bisector axis.
  Vec3 w = (blend.v - blend.u).normalized();
  Vec3 q = first_half(2.0 * blend.half_arc - s) - blend.corner;
  return blend.corner + 2.0 * w.dot(q) * w - q;
}

}  // namespace boundplan
