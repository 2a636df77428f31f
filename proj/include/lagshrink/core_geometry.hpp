#pragma once

// The C^2 / R^4 dictionary: (x1, x2, x3, x4) <-> (x1 + i x2, x3 + i x4).
// Complex structure J, Kahler form, Hermitian product, hyperplane reflections
// and the unitary map that moves a symmetry hyperplane onto {x1 = 0}.

#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "error.hpp"

namespace lagshrink {

using Complex = std::complex<double>;

struct Point4 {
  std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};

  constexpr Point4() = default;
  constexpr Point4(double x1, double x2, double x3, double x4) : x{x1, x2, x3, x4} {}
  Point4(Complex a, Complex b) : x{a.real(), a.imag(), b.real(), b.imag()} {}

  constexpr double operator[](std::size_t i) const { return x[i]; }
  constexpr double &operator[](std::size_t i) { return x[i]; }

  Complex a() const { return {x[0], x[1]}; }
  Complex b() const { return {x[2], x[3]}; }

  constexpr Point4 operator+(const Point4 &o) const {
    return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2], x[3] + o.x[3]};
  }
  constexpr Point4 operator-(const Point4 &o) const {
    return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2], x[3] - o.x[3]};
  }
  constexpr Point4 operator-() const { return {-x[0], -x[1], -x[2], -x[3]}; }
  constexpr Point4 operator*(double s) const {
    return {x[0] * s, x[1] * s, x[2] * s, x[3] * s};
  }
  constexpr Point4 operator/(double s) const {
    return {x[0] / s, x[1] / s, x[2] / s, x[3] / s};
  }
  constexpr Point4 &operator+=(const Point4 &o) {
    for (std::size_t i = 0; i < 4; ++i) x[i] += o.x[i];
    return *this;
  }
  constexpr Point4 &operator-=(const Point4 &o) {
    for (std::size_t i = 0; i < 4; ++i) x[i] -= o.x[i];
    return *this;
  }
  friend constexpr Point4 operator*(double s, const Point4 &p) { return p * s; }
  constexpr bool operator==(const Point4 &) const = default;

  constexpr double dot(const Point4 &o) const {
    return x[0] * o.x[0] + x[1] * o.x[1] + x[2] * o.x[2] + x[3] * o.x[3];
  }
  constexpr double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline constexpr Point4 basis4(std::size_t i) {
  Point4 e;
  e.x[i] = 1.0;
  return e;
}

using Mat4 = std::array<std::array<double, 4>, 4>;
using CMat2 = std::array<std::array<Complex, 2>, 2>;

/// Multiplication by i on C^2.
inline constexpr Point4 apply_J(const Point4 &v) {
  return {-v[1], v[0], -v[3], v[2]};
}

inline constexpr Mat4 J_matrix() {
  return Mat4{{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}};
}

/// omega = dx1 ^ dx2 + dx3 ^ dx4, so omega(u, v) = <J u, v>.
inline constexpr double kahler_form(const Point4 &u, const Point4 &v) {
  return u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2];
}

/// Im<u, v> = kHermitianOmegaSign * omega(u, v) with <u, v> = A_u conj(A_v) + B_u conj(B_v).
/// Fixed by evaluating on (e1, e2): <1, i> = -i while omega(e1, e2) = 1.
inline constexpr double kHermitianOmegaSign = -1.0;

inline Complex hermitian(const Point4 &u, const Point4 &v) {
  return u.a() * std::conj(v.a()) + u.b() * std::conj(v.b());
}

// ---------------------------------------------------------------------------
// Hyperplanes through the origin

class Hyperplane {
public:
  static constexpr double kUnitTolerance = 1e-12;

  // The stored normal is renormalized so downstream unitarity is exact to rounding.
  explicit Hyperplane(const Point4 &nu) : nu_(nu) {
    const double n = nu.norm();
    require(std::abs(n - 1.0) <= kUnitTolerance, ErrorKind::InputDomain,
            "hyperplane normal must be a unit vector");
    nu_ = nu / n;
  }

  /// Normalizes any nonzero vector first.
  static Hyperplane from_direction(const Point4 &v) {
    const double n = v.norm();
    require(n > 0.0 && std::isfinite(n), ErrorKind::InputDomain,
            "hyperplane normal must be nonzero");
    return Hyperplane(v / n);
  }

  const Point4 &normal() const { return nu_; }
  double signed_distance(const Point4 &v) const { return v.dot(nu_); }

private:
  Point4 nu_;
};

/// Householder reflection v - 2 (v . nu) nu.
inline Point4 reflect(const Hyperplane &h, const Point4 &v) {
  return v - h.normal() * (2.0 * v.dot(h.normal()));
}

// ---------------------------------------------------------------------------
// 2x2 complex / 4x4 real matrices

inline CMat2 cmat_mul(const CMat2 &a, const CMat2 &b) {
  CMat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline CMat2 cmat_adjoint(const CMat2 &a) {
  return CMat2{{{std::conj(a[0][0]), std::conj(a[1][0])},
                {std::conj(a[0][1]), std::conj(a[1][1])}}};
}

inline CMat2 cmat_identity() {
  return CMat2{{{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(1, 0)}}};
}

/// max |G G* - I| over entries
inline double unitarity_defect(const CMat2 &g) {
  const CMat2 p = cmat_mul(g, cmat_adjoint(g));
  const CMat2 id = cmat_identity();
  double d = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(p[i][j] - id[i][j]));
  return d;
}

inline std::array<Complex, 2> cmat_apply(const CMat2 &g, Complex a, Complex b) {
  return {g[0][0] * a + g[0][1] * b, g[1][0] * a + g[1][1] * b};
}

inline Mat4 mat4_identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 mat4_mul(const Mat4 &a, const Mat4 &b) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

inline Mat4 mat4_transpose(const Mat4 &a) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[j][i];
  return r;
}

inline Point4 mat4_apply(const Mat4 &m, const Point4 &v) {
  Point4 r;
  for (int i = 0; i < 4; ++i)
    r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
  return r;
}

inline double mat4_max_abs_diff(const Mat4 &a, const Mat4 &b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

inline constexpr double kUnitaryTolerance = 1e-12;

/// Each complex entry z becomes the block [[Re z, -Im z], [Im z, Re z]].
inline Mat4 unitary_to_orthogonal(const CMat2 &g) {
  const double defect = unitarity_defect(g);
  if (!(defect <= kUnitaryTolerance)) {
    std::ostringstream msg;
    msg << "matrix is not unitary (defect " << defect << ")";
    fail(ErrorKind::InputDomain, msg.str());
  }
  Mat4 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Complex z = g[i][j];
      m[2 * i][2 * j] = z.real();
      m[2 * i][2 * j + 1] = -z.imag();
      m[2 * i + 1][2 * j] = z.imag();
      m[2 * i + 1][2 * j + 1] = z.real();
    }
  return m;
}

struct UnitaryMap {
  CMat2 entries;
  Mat4 real_form;

  static UnitaryMap from_complex(const CMat2 &g) {
    return UnitaryMap{g, unitary_to_orthogonal(g)};
  }

  Point4 apply(const Point4 &v) const { return mat4_apply(real_form, v); }
};

/// G = [[conj a, conj b], [-b, a]] for nu = (a, b) in C^2, so G nu = (1, 0).
/// The real form sends nu to e1 and the hyperplane nu^perp into {x1 = 0}.
inline UnitaryMap normalize_hyperplane(const Hyperplane &h) {
  const Complex a = h.normal().a(), b = h.normal().b();
  const CMat2 g{{{std::conj(a), std::conj(b)}, {-b, a}}};
  return UnitaryMap::from_complex(g);
}

} // namespace lagshrink
