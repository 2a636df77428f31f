#pragma once

// Pointwise differential geometry of parametrized surfaces in R^4.

#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "core_geometry.hpp"
#include "error.hpp"

namespace lagshrink {

struct SurfaceJet {
  Point4 F, Fs, Ft, Fss, Fst, Ftt;
};

struct Metric2 {
  double E = 1.0, F = 0.0, G = 1.0;

  double det() const { return E * G - F * F; }
  // inverse metric entries g^ss, g^st, g^tt
  std::array<double, 3> inverse() const {
    const double d = det();
    return {G / d, -F / d, E / d};
  }
};

inline Metric2 metric_of(const SurfaceJet &jet) {
  return {jet.Fs.dot(jet.Fs), jet.Fs.dot(jet.Ft), jet.Ft.dot(jet.Ft)};
}

/// Component of v normal to the tangent plane spanned by Fs, Ft.
inline Point4 normal_part(const SurfaceJet &jet, const Point4 &v) {
  const Metric2 g = metric_of(jet);
  const auto inv = g.inverse();
  const double a = v.dot(jet.Fs), b = v.dot(jet.Ft);
  const double cs = inv[0] * a + inv[1] * b;
  const double ct = inv[1] * a + inv[2] * b;
  return v - jet.Fs * cs - jet.Ft * ct;
}

struct IsothermalDefect {
  double length_gap; // | |Fs| - |Ft| |
  double angle_gap;  // | Fs . Ft |
};

inline IsothermalDefect isothermal_defect(const SurfaceJet &jet) {
  return {std::abs(jet.Fs.norm() - jet.Ft.norm()), std::abs(jet.Fs.dot(jet.Ft))};
}

inline constexpr double kIsothermalTolerance = 1e-6;

/// H = (Delta F)^perp with Delta = (d_ss + d_tt) / lambda in isothermal coordinates.
inline Point4 mean_curvature(const SurfaceJet &jet, double iso_tol = kIsothermalTolerance) {
  const IsothermalDefect d = isothermal_defect(jet);
  if (!(d.length_gap <= iso_tol && d.angle_gap <= iso_tol)) {
    std::ostringstream msg;
    msg << "jet is not isothermal: ||Fs|-|Ft|| = " << d.length_gap << ", Fs.Ft = " << d.angle_gap;
    fail(ErrorKind::InputDomain, msg.str());
  }
  const double lambda = 0.5 * (jet.Fs.norm_sq() + jet.Ft.norm_sq());
  return normal_part(jet, (jet.Fss + jet.Ftt) / lambda);
}

/// |sigma|^2 = g^ik g^jl <sigma_ij, sigma_kl> with sigma_ij = (F_ij)^perp.
inline double second_fundamental_norm_sq(const SurfaceJet &jet) {
  const auto inv = metric_of(jet).inverse();
  const Point4 sss = normal_part(jet, jet.Fss);
  const Point4 sst = normal_part(jet, jet.Fst);
  const Point4 stt = normal_part(jet, jet.Ftt);
  // g^ij in matrix form
  const double g[2][2] = {{inv[0], inv[1]}, {inv[1], inv[2]}};
  const Point4 *sig[2][2] = {{&sss, &sst}, {&sst, &stt}};
  double total = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) total += g[i][k] * g[j][l] * sig[i][j]->dot(*sig[k][l]);
  return total;
}

/// Metric coefficients with the derivatives the Brioschi formula needs.
struct MetricJet {
  double E, F, G;
  double E_u, E_v, F_u, F_v, G_u, G_v;
  double E_vv, F_uv, G_uu;
};

/// Gauss curvature from the first fundamental form alone.
inline double brioschi(const MetricJet &m) {
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double m1[3][3] = {{-0.5 * m.E_vv + m.F_uv - 0.5 * m.G_uu, 0.5 * m.E_u, m.F_u - 0.5 * m.E_v},
                           {m.F_v - 0.5 * m.G_u, m.E, m.F},
                           {0.5 * m.G_v, m.F, m.G}};
  const double m2[3][3] = {{0.0, 0.5 * m.E_v, 0.5 * m.G_u}, {0.5 * m.E_v, m.E, m.F}, {0.5 * m.G_u, m.F, m.G}};
  const double d = m.E * m.G - m.F * m.F;
  return (det3(m1) - det3(m2)) / (d * d);
}

using Chart = std::function<Point4(double, double)>;

/// Second-order central-difference jet of a chart at (u, v).
inline SurfaceJet chart_jet(const Chart &f, double u, double v, double h) {
  SurfaceJet jet;
  const Point4 c = f(u, v);
  const Point4 up = f(u + h, v), um = f(u - h, v), vp = f(u, v + h), vm = f(u, v - h);
  jet.F = c;
  jet.Fs = (up - um) / (2.0 * h);
  jet.Ft = (vp - vm) / (2.0 * h);
  jet.Fss = (up - c * 2.0 + um) / (h * h);
  jet.Ftt = (vp - c * 2.0 + vm) / (h * h);
  jet.Fst = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h);
  return jet;
}

/// Gauss curvature of a chart by nested central differences of its metric.
inline double chart_gauss_curvature(const Chart &f, double u, double v, double h) {
  auto metric = [&](double a, double b) {
    const Point4 fu = (f(a + h, b) - f(a - h, b)) / (2.0 * h);
    const Point4 fv = (f(a, b + h) - f(a, b - h)) / (2.0 * h);
    return Metric2{fu.dot(fu), fu.dot(fv), fv.dot(fv)};
  };
  const Metric2 c = metric(u, v);
  const Metric2 up = metric(u + h, v), um = metric(u - h, v);
  const Metric2 vp = metric(u, v + h), vm = metric(u, v - h);
  const Metric2 pp = metric(u + h, v + h), pm = metric(u + h, v - h);
  const Metric2 mp = metric(u - h, v + h), mm = metric(u - h, v - h);
  MetricJet m{};
  m.E = c.E;
  m.F = c.F;
  m.G = c.G;
  m.E_u = (up.E - um.E) / (2 * h);
  m.E_v = (vp.E - vm.E) / (2 * h);
  m.F_u = (up.F - um.F) / (2 * h);
  m.F_v = (vp.F - vm.F) / (2 * h);
  m.G_u = (up.G - um.G) / (2 * h);
  m.G_v = (vp.G - vm.G) / (2 * h);
  m.E_vv = (vp.E - 2 * c.E + vm.E) / (h * h);
  m.G_uu = (up.G - 2 * c.G + um.G) / (h * h);
  m.F_uv = (pp.F - pm.F - mp.F + mm.F) / (4 * h * h);
  return brioschi(m);
}

struct LagrangianDefect {
  double omega;          // omega(Fs, Ft)
  double j_orthogonality; // <J Fs, Ft>
};

inline LagrangianDefect lagrangian_defect(const SurfaceJet &jet) {
  return {kahler_form(jet.Fs, jet.Ft), apply_J(jet.Fs).dot(jet.Ft)};
}

} // namespace lagshrink
