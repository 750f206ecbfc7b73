// Small fixed-size vector/quaternion math used by the runtime. Double
// precision throughout; all operations are branch-stable so repeated runs
// produce bit-identical results.
#pragma once

#include <cmath>

namespace itflow::math {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }
inline bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return length(a - b); }

// Unit quaternion in (w, x, y, z) order.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat conjugate() const { return {w, -x, -y, -z}; }
  Quat normalized() const {
    const double n = norm();
    return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : Quat{};
  }

  // axis must be unit length; angle in radians
  static Quat axis_angle(const Vec3& axis, double radians) {
    const double h = 0.5 * radians;
    const double s = std::sin(h);
    return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
  }
  static Quat yaw(double radians) { return axis_angle({0.0, 1.0, 0.0}, radians); }
};

inline bool operator==(const Quat& a, const Quat& b) {
  return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
}

inline Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Vec3 rotate(const Quat& q, const Vec3& v) {
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 t = 2.0 * cross(u, v);
  return v + q.w * t + cross(u, t);
}

// Columns of the rotation matrix, i.e. the rotated basis vectors.
inline void rotation_columns(const Quat& q, Vec3& cx, Vec3& cy, Vec3& cz) {
  cx = rotate(q, {1.0, 0.0, 0.0});
  cy = rotate(q, {0.0, 1.0, 0.0});
  cz = rotate(q, {0.0, 0.0, 1.0});
}

inline constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }

}  // namespace itflow::math
