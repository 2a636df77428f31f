#pragma once

#include <cmath>

namespace lagshrink {

struct Vec2 {
  double x = 0.0, y = 0.0;

  constexpr Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 &operator+=(const Vec2 &o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2 &operator-=(const Vec2 &o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }

  constexpr double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
  // z-component of the 3D cross product
  constexpr double cross(const Vec2 &o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm_sq() const { return x * x + y * y; }
  // counter-clockwise quarter turn
  constexpr Vec2 perp() const { return {-y, x}; }

  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }

  friend constexpr Vec2 operator*(double s, const Vec2 &v) { return v * s; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.cross(b); }

} // namespace lagshrink
