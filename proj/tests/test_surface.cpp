#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <lagshrink/surface.hpp>

#include "test_util.hpp"

using namespace lagshrink;

namespace {

SurfaceJet clifford_jet(double s, double t) {
  SurfaceJet j;
  j.F = {std::cos(s), std::sin(s), std::cos(t), std::sin(t)};
  j.Fs = {-std::sin(s), std::cos(s), 0, 0};
  j.Ft = {0, 0, -std::sin(t), std::cos(t)};
  j.Fss = {-std::cos(s), -std::sin(s), 0, 0};
  j.Fst = {0, 0, 0, 0};
  j.Ftt = {0, 0, -std::cos(t), -std::sin(t)};
  return j;
}

// round sphere of radius R in the x1x2x3 space, Mercator (isothermal) chart
Point4 mercator_sphere(double R, double u, double v) {
  const double sech = 1.0 / std::cosh(u);
  return {R * sech * std::cos(v), R * sech * std::sin(v), R * std::tanh(u), 0.0};
}

} // namespace

TEST(MeanCurvature, CliffordTorus) {
  for (double s : {0.0, 0.7, 2.1, 4.4})
    for (double t : {0.3, 1.9, 5.0}) {
      const SurfaceJet j = clifford_jet(s, t);
      const Point4 H = mean_curvature(j);
      EXPECT_NEAR(H.norm_sq(), 2.0, 1e-14);
      // H = -F^perp, and F is normal here
      EXPECT_LT((H + normal_part(j, j.F)).norm(), 1e-14);
      EXPECT_NEAR(second_fundamental_norm_sq(j), 2.0, 1e-14);
    }
}

TEST(MeanCurvature, SphereOfRadiusTwo) {
  const Chart f = [](double u, double v) { return mercator_sphere(2.0, u, v); };
  for (double u : {-0.8, 0.0, 0.5})
    for (double v : {0.0, 1.3, 4.0}) {
      const SurfaceJet j = chart_jet(f, u, v, 1e-4);
      const Point4 H = mean_curvature(j, 1e-6);
      EXPECT_NEAR(H.norm(), 1.0, 1e-6);
      // points towards the centre
      EXPECT_LT(H.dot(j.F), 0.0);
    }
}

TEST(MeanCurvature, RejectsNonIsothermalJet) {
  SurfaceJet j = clifford_jet(0.0, 0.0);
  j.Ft = j.Ft * 2.0;
  EXPECT_ERROR_KIND(mean_curvature(j), ErrorKind::InputDomain);
}

TEST(GaussCurvature, UnitSphere) {
  const Chart f = [](double u, double v) {
    return Point4{std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u), 0.0};
  };
  for (double u : {0.6, 1.2, 2.0})
    EXPECT_NEAR(chart_gauss_curvature(f, u, 0.4, 1e-3), 1.0, 1e-3);
}

TEST(GaussCurvature, FlatProductChart) {
  const Chart f = [](double s, double t) { return clifford_jet(s, t).F; };
  EXPECT_NEAR(chart_gauss_curvature(f, 0.3, 1.1, 1e-3), 0.0, 1e-6);
}

TEST(Brioschi, IdentityMetricIsFlat) {
  MetricJet m{};
  m.E = m.G = 1.0;
  EXPECT_EQ(brioschi(m), 0.0);
}

TEST(Lagrangian, ProductAndGraphSurfaces) {
  const LagrangianDefect clifford = lagrangian_defect(clifford_jet(0.4, 2.2));
  EXPECT_EQ(clifford.omega, 0.0);
  EXPECT_EQ(clifford.j_orthogonality, 0.0);

  // F = (s, t, s t, 0): Fs = (1, 0, t, 0), Ft = (0, 1, s, 0), omega(Fs, Ft) = 1
  for (double s : {-1.0, 0.0, 0.5})
    for (double t : {-0.3, 2.0}) {
      SurfaceJet j;
      j.Fs = {1.0, 0.0, t, 0.0};
      j.Ft = {0.0, 1.0, s, 0.0};
      const LagrangianDefect d = lagrangian_defect(j);
      EXPECT_EQ(d.omega, 1.0);
      EXPECT_EQ(d.j_orthogonality, 1.0);
    }
}

TEST(NormalPart, RemovesTangentialComponents) {
  const SurfaceJet j = clifford_jet(1.0, 2.0);
  const Point4 v{0.3, -1.2, 0.8, 2.5};
  const Point4 n = normal_part(j, v);
  EXPECT_NEAR(n.dot(j.Fs), 0.0, 1e-15);
  EXPECT_NEAR(n.dot(j.Ft), 0.0, 1e-15);
}
