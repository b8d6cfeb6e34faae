#pragma once

// Small value-type vector/matrix/box math used across the engine.
// Everything is double precision; angles are radians.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace homegen {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r + 0.0;  // folds -0.0 into +0.0
}

/// Smallest absolute difference between two angles, in [0, pi].
inline double angle_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return d > kPi ? kTwoPi - d : d;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
  }
  /// Rotate counter-clockwise by `a` radians.
  Vec2 rotated(double a) const {
    double c = std::cos(a), s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
  Vec2 xy() const { return {x, y}; }
};

inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) {
  return a + (b - a) * t;
}

/// Column-major-free 3x3 matrix: m[r][c].
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  static Mat3 identity() { return Mat3{}; }

  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 r;
    r.m = {{{c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z}}};
    return r;
  }

  static Mat3 rotation_z(double a) {
    double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r.m = {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
    return r;
  }

  Vec3 col(int i) const { return {m[0][i], m[1][i], m[2][i]}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }

  double determinant() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  /// Max-abs entry of (R^T R - I); zero for a perfect rotation.
  double orthonormality_error() const {
    Mat3 g = transposed() * (*this);
    double e = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        e = std::max(e, std::fabs(g.m[i][j] - (i == j ? 1.0 : 0.0)));
    return e;
  }
};

/// Closed 1D interval overlap length (negative when disjoint).
inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0);
}

/// Axis-aligned 3D box.
struct Aabb3 {
  Vec3 lo;
  Vec3 hi;

  void expand(const Vec3& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  Vec3 size() const { return hi - lo; }
  Vec3 center() const { return (lo + hi) * 0.5; }
};

/// Oriented rectangle in the floor plane: center, half extents, yaw.
struct Obb2 {
  Vec2 center;
  double hx = 0.0;
  double hy = 0.0;
  double yaw = 0.0;

  std::array<Vec2, 4> corners() const {
    std::array<Vec2, 4> out;
    const Vec2 ex = Vec2{1, 0}.rotated(yaw);
    const Vec2 ey = Vec2{0, 1}.rotated(yaw);
    out[0] = center + ex * hx + ey * hy;
    out[1] = center - ex * hx + ey * hy;
    out[2] = center - ex * hx - ey * hy;
    out[3] = center + ex * hx - ey * hy;
    return out;
  }

  bool contains(const Vec2& p) const {
    Vec2 d = (p - center).rotated(-yaw);
    return std::fabs(d.x) <= hx && std::fabs(d.y) <= hy;
  }

  /// Axis-aligned bounds of the rotated rectangle.
  void bounds(Vec2& lo, Vec2& hi) const {
    auto cs = corners();
    lo = hi = cs[0];
    for (int i = 1; i < 4; ++i) {
      lo.x = std::min(lo.x, cs[i].x);
      lo.y = std::min(lo.y, cs[i].y);
      hi.x = std::max(hi.x, cs[i].x);
      hi.y = std::max(hi.y, cs[i].y);
    }
  }
};

namespace detail {
// Projection radius of box `b` onto unit axis, plus projected center distance.
inline double sat_overlap_on_axis(const Obb2& a, const Obb2& b, const Vec2& axis) {
  const Vec2 ax_a = Vec2{1, 0}.rotated(a.yaw), ay_a = Vec2{0, 1}.rotated(a.yaw);
  const Vec2 ax_b = Vec2{1, 0}.rotated(b.yaw), ay_b = Vec2{0, 1}.rotated(b.yaw);
  double ra = a.hx * std::fabs(axis.dot(ax_a)) + a.hy * std::fabs(axis.dot(ay_a));
  double rb = b.hx * std::fabs(axis.dot(ax_b)) + b.hy * std::fabs(axis.dot(ay_b));
  double d = std::fabs((b.center - a.center).dot(axis));
  return ra + rb - d;  // positive = overlapping on this axis
}
}  // namespace detail

/// Separating-axis intersection test. `eps` shrinks the boxes so that
/// exactly-touching edges do not count as overlap.
inline bool obb_intersect(const Obb2& a, const Obb2& b, double eps = 1e-9) {
  const Vec2 axes[4] = {Vec2{1, 0}.rotated(a.yaw), Vec2{0, 1}.rotated(a.yaw),
                        Vec2{1, 0}.rotated(b.yaw), Vec2{0, 1}.rotated(b.yaw)};
  for (const Vec2& ax : axes) {
    if (detail::sat_overlap_on_axis(a, b, ax) <= eps) return false;
  }
  return true;
}

/// Minimum translation vector pushing `b` out of `a`. Valid only when the
/// boxes intersect; returns the smallest-depth SAT axis scaled by its depth.
inline Vec2 obb_mtv(const Obb2& a, const Obb2& b) {
  const Vec2 axes[4] = {Vec2{1, 0}.rotated(a.yaw), Vec2{0, 1}.rotated(a.yaw),
                        Vec2{1, 0}.rotated(b.yaw), Vec2{0, 1}.rotated(b.yaw)};
  double best = std::numeric_limits<double>::max();
  Vec2 best_axis{1, 0};
  for (const Vec2& ax : axes) {
    double ov = detail::sat_overlap_on_axis(a, b, ax);
    if (ov < best) {
      best = ov;
      best_axis = ax;
    }
  }
  if ((b.center - a.center).dot(best_axis) < 0.0) best_axis = best_axis * -1.0;
  return best_axis * std::max(best, 0.0);
}

}  // namespace homegen
