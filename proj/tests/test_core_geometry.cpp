#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <lagshrink/core_geometry.hpp>

#include "test_util.hpp"

using namespace lagshrink;

namespace {

void expect_near(const Point4 &a, const Point4 &b, double tol) {
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], tol) << "component " << i;
}

Point4 random_point(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Point4(n(rng), n(rng), n(rng), n(rng));
}

CMat2 random_unitary(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Complex a(n(rng), n(rng)), b(n(rng), n(rng)), c(n(rng), n(rng)), d(n(rng), n(rng));
  // Gram-Schmidt on the columns
  const double na = std::sqrt(std::norm(a) + std::norm(c));
  a /= na;
  c /= na;
  const Complex proj = std::conj(a) * b + std::conj(c) * d;
  b -= proj * a;
  d -= proj * c;
  const double nb = std::sqrt(std::norm(b) + std::norm(d));
  return CMat2{{{a, b / nb}, {c, d / nb}}};
}

} // namespace

TEST(ComplexStructure, JOnBasisVectors) {
  expect_near(apply_J(basis4(0)), basis4(1), 0.0);
  expect_near(apply_J(basis4(2)), basis4(3), 0.0);
  const Point4 v(1, 2, 3, 4);
  expect_near(apply_J(apply_J(v)), v * -1.0, 0.0);
}

TEST(ComplexStructure, JIsMultiplicationByI) {
  const Point4 v(0.3, -1.2, 2.5, 0.7);
  const Point4 jv = apply_J(v);
  EXPECT_EQ(jv.a(), Complex(0, 1) * v.a());
  EXPECT_EQ(jv.b(), Complex(0, 1) * v.b());
  expect_near(mat4_apply(J_matrix(), v), jv, 0.0);
}

TEST(ComplexStructure, ComplexViewIsBitConsistent) {
  const Point4 v(1.5, -2.25, 3.125, -4.0625);
  const Point4 w(v.a(), v.b());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(v[i], w[i]);
}

TEST(KahlerForm, Examples) {
  EXPECT_EQ(kahler_form(basis4(0), basis4(1)), 1.0);
  EXPECT_EQ(kahler_form(basis4(0), basis4(2)), 0.0);
  const Point4 v(1, 2, 3, 4);
  EXPECT_EQ(kahler_form(v, v), 0.0);
}

TEST(KahlerForm, CompatibleWithJAndMetric) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const Point4 u = random_point(rng), v = random_point(rng);
    EXPECT_NEAR(kahler_form(u, v), apply_J(u).dot(v), 1e-14);
  }
}

TEST(Hermitian, Examples) {
  EXPECT_EQ(hermitian(basis4(0), basis4(0)), Complex(1, 0));
  const Complex e12 = hermitian(basis4(0), basis4(1));
  EXPECT_EQ(e12.real(), 0.0);
  // <1, i> = 1 * conj(i) = -i, while omega(e1, e2) = 1
  EXPECT_EQ(e12.imag(), -1.0);
  EXPECT_EQ(e12.imag(), kHermitianOmegaSign * kahler_form(basis4(0), basis4(1)));
}

TEST(Hermitian, RealPartIsDotAndImaginaryPartIsSignedOmega) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Point4 u = random_point(rng), v = random_point(rng);
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) dot += u[i] * v[i];
    const Complex h = hermitian(u, v);
    EXPECT_NEAR(h.real(), dot, 1e-14);
    EXPECT_NEAR(h.imag(), kHermitianOmegaSign * kahler_form(u, v), 1e-14);
  }
}

TEST(Hyperplane, RejectsNonUnitNormal) {
  EXPECT_ERROR_KIND(Hyperplane(Point4(1.0, 1.0, 0.0, 0.0)), ErrorKind::InputDomain);
  EXPECT_ERROR_KIND(Hyperplane(Point4(2.0, 0.0, 0.0, 0.0)), ErrorKind::InputDomain);
  EXPECT_NO_THROW(Hyperplane(Point4(1.0 + 1e-13, 0.0, 0.0, 0.0)));
}

TEST(Reflect, Examples) {
  const Hyperplane e1(basis4(0));
  expect_near(reflect(e1, Point4(1, 2, 3, 4)), Point4(-1, 2, 3, 4), 0.0);
  const Hyperplane diag(Point4(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0));
  // e1 - 2 (1/sqrt2) (1/sqrt2)(1, 1, 0, 0) = (0, -1, 0, 0)
  expect_near(reflect(diag, basis4(0)), Point4(0, -1, 0, 0), 1e-15);
}

TEST(Reflect, InvolutionFixingThePlane) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Hyperplane h = Hyperplane::from_direction(random_point(rng));
    const Point4 v = random_point(rng);
    expect_near(reflect(h, reflect(h, v)), v, 1e-14);
    const Point4 in_plane = v - h.normal() * v.dot(h.normal());
    expect_near(reflect(h, in_plane), in_plane, 1e-14);
  }
}

TEST(Reflect, AntiSymplecticOnFirstFactorForCoordinateNormal) {
  const Hyperplane h(basis4(0));
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    Point4 v = random_point(rng), w = random_point(rng);
    v[2] = v[3] = w[2] = w[3] = 0.0;
    EXPECT_EQ(kahler_form(reflect(h, v), reflect(h, w)), -kahler_form(v, w));
  }
  // the second factor is untouched, so the sign flip is not global
  EXPECT_EQ(kahler_form(reflect(h, basis4(2)), reflect(h, basis4(3))), 1.0);
}

TEST(NormalizeHyperplane, Examples) {
  const UnitaryMap id = normalize_hyperplane(Hyperplane(basis4(0)));
  EXPECT_EQ(mat4_max_abs_diff(id.real_form, mat4_identity()), 0.0);

  const UnitaryMap swap = normalize_hyperplane(Hyperplane(basis4(2)));
  EXPECT_EQ(swap.entries[0][0], Complex(0, 0));
  EXPECT_EQ(swap.entries[0][1], Complex(1, 0));
  EXPECT_EQ(swap.entries[1][0], Complex(-1, 0));
  EXPECT_EQ(swap.entries[1][1], Complex(0, 0));

  const UnitaryMap gi = normalize_hyperplane(Hyperplane(basis4(1)));
  EXPECT_EQ(gi.entries[0][0], Complex(0, -1));
  EXPECT_EQ(gi.entries[0][1], Complex(0, 0));
  const auto image = cmat_apply(gi.entries, Complex(0, 1), Complex(0, 0));
  EXPECT_EQ(image[0], Complex(1, 0));
  EXPECT_EQ(image[1], Complex(0, 0));
  EXPECT_LE(unitarity_defect(gi.entries), 1e-15);
}

TEST(NormalizeHyperplane, RandomNormals) {
  std::mt19937_64 rng(2024);
  const Mat4 J = J_matrix();
  for (int k = 0; k < 100; ++k) {
    const Hyperplane h = Hyperplane::from_direction(random_point(rng));
    const UnitaryMap g = normalize_hyperplane(h);
    const auto image = cmat_apply(g.entries, h.normal().a(), h.normal().b());
    EXPECT_LE(std::abs(image[0] - Complex(1, 0)), 1e-12);
    EXPECT_LE(std::abs(image[1]), 1e-12);
    EXPECT_LE(mat4_max_abs_diff(mat4_mul(mat4_transpose(g.real_form), g.real_form), mat4_identity()), 1e-12);
    EXPECT_LE(mat4_max_abs_diff(mat4_mul(g.real_form, J), mat4_mul(J, g.real_form)), 1e-12);
    expect_near(g.apply(h.normal()), basis4(0), 1e-12);
    // the hyperplane lands in {x1 = 0}
    const Point4 v = random_point(rng);
    const Point4 in_plane = v - h.normal() * v.dot(h.normal());
    EXPECT_NEAR(g.apply(in_plane)[0], 0.0, 1e-12);
  }
}

TEST(UnitaryToOrthogonal, Examples) {
  EXPECT_EQ(mat4_max_abs_diff(unitary_to_orthogonal(cmat_identity()), mat4_identity()), 0.0);
  const CMat2 iI{{{Complex(0, 1), Complex(0, 0)}, {Complex(0, 0), Complex(0, 1)}}};
  EXPECT_EQ(mat4_max_abs_diff(unitary_to_orthogonal(iI), J_matrix()), 0.0);
}

TEST(UnitaryToOrthogonal, RejectsNonUnitary) {
  const CMat2 bad{{{Complex(1, 0), Complex(0.1, 0)}, {Complex(0, 0), Complex(1, 0)}}};
  EXPECT_ERROR_KIND(unitary_to_orthogonal(bad), ErrorKind::InputDomain);
}

TEST(UnitaryToOrthogonal, RandomUnitariesAreOrthogonalAndCommuteWithJ) {
  std::mt19937_64 rng(77);
  const Mat4 J = J_matrix();
  for (int k = 0; k < 100; ++k) {
    const Mat4 m = unitary_to_orthogonal(random_unitary(rng));
    EXPECT_LE(mat4_max_abs_diff(mat4_mul(mat4_transpose(m), m), mat4_identity()), 1e-12);
    EXPECT_LE(mat4_max_abs_diff(mat4_mul(m, J), mat4_mul(J, m)), 1e-12);
  }
}

TEST(UnitaryToOrthogonal, IsAHomomorphism) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    const CMat2 a = random_unitary(rng), b = random_unitary(rng);
    const Mat4 lhs = unitary_to_orthogonal(cmat_mul(a, b));
    const Mat4 rhs = mat4_mul(unitary_to_orthogonal(a), unitary_to_orthogonal(b));
    EXPECT_LE(mat4_max_abs_diff(lhs, rhs), 1e-12);
  }
}

TEST(UnitaryToOrthogonal, RealFormMatchesComplexAction) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const UnitaryMap g = UnitaryMap::from_complex(random_unitary(rng));
    const Point4 v = random_point(rng);
    const auto w = cmat_apply(g.entries, v.a(), v.b());
    expect_near(g.apply(v), Point4(w[0], w[1]), 1e-14);
  }
}
