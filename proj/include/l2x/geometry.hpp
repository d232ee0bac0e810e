#ifndef L2X_GEOMETRY_HPP
#define L2X_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>

namespace l2x {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vector2 = Vec2<double>;

/// Axis-aligned rectangle in world units (meters).
template <typename Scalar>
struct Rect {
  Vec2<Scalar> min = Vec2<Scalar>::Zero();
  Vec2<Scalar> max = Vec2<Scalar>::Zero();

  Scalar width() const { return max.x() - min.x(); }
  Scalar height() const { return max.y() - min.y(); }

  bool contains(const Vec2<Scalar>& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  Vec2<Scalar> clamp(const Vec2<Scalar>& p) const {
    return p.cwiseMax(min).cwiseMin(max);
  }

  bool operator==(const Rect& o) const { return min == o.min && max == o.max; }
};

using Bounds = Rect<double>;

/// Wraps an angle into [-pi, pi). Values already in range are returned
/// unchanged, bit for bit.
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (a >= -pi && a < pi) return a;
  Scalar r = std::fmod(a + pi, Scalar(2) * pi);
  if (r < 0) r += Scalar(2) * pi;
  r -= pi;
  // fmod rounding can land exactly on +pi
  if (r >= pi) r -= Scalar(2) * pi;
  return r;
}

template <typename Scalar>
Vec2<Scalar> heading_vector(Scalar heading) {
  return Vec2<Scalar>(std::cos(heading), std::sin(heading));
}

/// Distance along a unit-direction ray from `origin` to the first point of
/// the disk (center, radius). An origin inside the disk hits at 0.
/// Returns nullopt when the ray misses.
template <typename Scalar>
std::optional<Scalar> ray_disk_distance(const Vec2<Scalar>& origin,
                                        const Vec2<Scalar>& direction,
                                        const Vec2<Scalar>& center,
                                        Scalar radius) {
  const Vec2<Scalar> to_center = center - origin;
  const Scalar c = to_center.squaredNorm() - radius * radius;
  if (c <= 0) return Scalar(0);
  const Scalar b = direction.dot(to_center);
  if (b <= 0) return std::nullopt;
  const Scalar disc = b * b - c;
  if (disc < 0) return std::nullopt;
  // c / (b + sqrt(disc)) is the near root without cancellation
  return c / (b + std::sqrt(disc));
}

/// True when the open disk overlaps the closed cell rectangle.
template <typename Scalar>
bool disk_overlaps_rect(const Vec2<Scalar>& center, Scalar radius,
                        const Rect<Scalar>& cell) {
  const Vec2<Scalar> nearest = cell.clamp(center);
  return (nearest - center).squaredNorm() < radius * radius;
}

}  // namespace l2x

#endif  // L2X_GEOMETRY_HPP
