#ifndef L2X_TESTS_ORACLES_HPP
#define L2X_TESTS_ORACLES_HPP

// Reference implementations written independently of src/, used to check
// the library against straightforward textbook formulas.

#include "l2x/simcore.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace l2x::testing {

struct RayTruth {
  double depth = 1.0;
  double r = 0, g = 0, b = 0;
  int cls = 0;
};

/// Quadratic |o + t d - c|^2 = r^2, smallest non-negative root.
inline double ray_circle(double ox, double oy, double dx, double dy, double cx, double cy, double rad) {
  const double fx = ox - cx, fy = oy - cy;
  const double b = fx * dx + fy * dy;
  const double c = fx * fx + fy * fy - rad * rad;
  if (c <= 0) return 0.0;
  const double disc = b * b - c;
  if (disc < 0 || b > 0) return std::numeric_limits<double>::infinity();
  return -b - std::sqrt(disc);
}

inline std::vector<RayTruth> cast_rays(const SimState& st, int rays, double fov, double range) {
  std::vector<RayTruth> out(rays);
  const auto& env = st.spec.environment;
  for (int i = 0; i < rays; ++i) {
    const double frac = rays == 1 ? 0.5 : static_cast<double>(i) / (rays - 1);
    const double ang = st.pose.heading + fov * (0.5 - frac);
    const double dx = std::cos(ang), dy = std::sin(ang);
    double best = std::numeric_limits<double>::infinity();
    const ObjectState* hit = nullptr;
    for (const auto& entry : st.live_objects) {
      const ObjectState& o = entry.second;
      const double t = ray_circle(st.pose.position.x(), st.pose.position.y(), dx, dy, o.position.x(),
                                  o.position.y(), o.spec.radius);
      if (t <= range && t < best) {
        best = t;
        hit = &o;
      }
    }
    const Rgb c = hit ? hit->spec.color : env.background_color;
    out[i].depth = hit ? best / range : 1.0;
    out[i].r = c.r / 255.0 * env.lighting;
    out[i].g = c.g / 255.0 * env.lighting;
    out[i].b = c.b / 255.0 * env.lighting;
    out[i].cls = hit ? hit->class_id : env.background_class;
  }
  return out;
}

}  // namespace l2x::testing

#endif  // L2X_TESTS_ORACLES_HPP
