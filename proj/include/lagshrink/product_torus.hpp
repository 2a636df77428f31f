#pragma once

// Product tori Gamma1 x Gamma2 in R^2 x R^2 = C^2 and their verification suite:
// shrinker equation, Lagrangian condition, the isothermal local equations,
// polar global relations, flatness and reflection symmetry.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "al_curve.hpp"
#include "core_geometry.hpp"
#include "nearest.hpp"
#include "parallel.hpp"
#include "periodic_interp.hpp"
#include "surface.hpp"

namespace lagshrink {

// ---------------------------------------------------------------------------
// Factor curves

/// Position and parameter derivatives of a planar curve.
struct CurveJet {
  Vec2 pos, d1, d2;
};

/// Closed planar curve with a periodic parameter. Shrinker-derived factors
/// keep their source curve for metadata (c_gamma, p, q, crossings).
class FactorCurve {
public:
  using Evaluator = std::function<CurveJet(double)>;

  FactorCurve(Evaluator eval, double period, std::shared_ptr<const ShrinkerCurve> source = nullptr,
              bool arclength = false)
      : eval_(std::move(eval)), period_(period), source_(std::move(source)), arclength_(arclength) {
    require(period_ > 0.0, ErrorKind::InputDomain, "factor curve period must be positive");
  }

  /// Trigonometric interpolation of the samples. For samples uniform in
  /// arclength the tangent comes from the interpolated angle phi, so the
  /// parametrization has unit speed to rounding; otherwise positions are
  /// interpolated and differentiated.
  static FactorCurve from_curve(const ShrinkerCurve &curve) {
    const std::size_t n = curve.size();
    require(n >= 8, ErrorKind::InputDomain, "factor curve needs at least 8 samples");
    const double length = curve.length();
    require(length > 0.0 && std::isfinite(length), ErrorKind::InputDomain, "curve length must be positive");
    bool uniform = true;
    const double ds = length / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double step = curve.samples[i + 1].s - curve.samples[i].s;
      if (std::abs(step - ds) > 1e-9 * length) uniform = false;
    }
    auto source = std::make_shared<const ShrinkerCurve>(curve);
    auto pos = std::make_shared<PeriodicInterpolant<Vec2>>(curve.polyline(), length);
    if (!uniform)
      return FactorCurve(
          [pos](double u) {
            const auto jet = pos->evaluate(u);
            return CurveJet{jet.value, jet.d1, jet.d2};
          },
          length, source, false);

    std::vector<double> phi(n + 1);
    for (std::size_t i = 0; i <= n; ++i) phi[i] = curve.samples[i].phi;
    unwrap_angles(phi);
    const double two_pi = 2.0 * std::numbers::pi;
    const double turning = two_pi * std::round((phi[n] - phi[0]) / two_pi);
    const double slope = turning / length;
    std::vector<double> periodic(n);
    for (std::size_t i = 0; i < n; ++i) periodic[i] = phi[i] - slope * ds * static_cast<double>(i);
    auto angle = std::make_shared<PeriodicInterpolant<double>>(periodic, length);
    return FactorCurve(
        [pos, angle, slope](double u) {
          const auto a = angle->evaluate(u);
          const double t = a.value + slope * u;
          const Vec2 tangent{std::cos(t), std::sin(t)};
          return CurveJet{(*pos)(u), tangent, tangent.perp() * (a.d1 + slope)};
        },
        length, source, true);
  }

  /// Round circle of the given radius parametrized by angle.
  static FactorCurve circle(double radius) {
    return FactorCurve(
        [radius](double u) {
          const Vec2 e{std::cos(u), std::sin(u)};
          return CurveJet{e * radius, e.perp() * radius, -e * radius};
        },
        2.0 * std::numbers::pi, nullptr, radius == 1.0);
  }

  FactorCurve scaled(double factor) const {
    Evaluator inner = eval_;
    return FactorCurve(
        [inner, factor](double u) {
          CurveJet j = inner(u);
          return CurveJet{j.pos * factor, j.d1 * factor, j.d2 * factor};
        },
        period_, nullptr, false);
  }

  CurveJet operator()(double u) const { return eval_(u); }
  double period() const { return period_; }
  bool arclength() const { return arclength_; }
  const ShrinkerCurve *source() const { return source_.get(); }

private:
  Evaluator eval_;
  double period_;
  std::shared_ptr<const ShrinkerCurve> source_;
  bool arclength_;
};

struct GridSize {
  std::size_t ns = 256, nt = 256;
};

inline constexpr std::size_t kMinGrid = 8;
inline constexpr double kClosureThreshold = 1e-6;

class ProductTorus {
public:
  ProductTorus(FactorCurve c1, FactorCurve c2, GridSize grid, unsigned threads = 1)
      : c1_(std::move(c1)), c2_(std::move(c2)), grid_(grid) {
    require(grid.ns >= kMinGrid && grid.nt >= kMinGrid, ErrorKind::InputDomain,
            "torus grid must be at least 8 x 8");
    jet1_.resize(grid.ns);
    jet2_.resize(grid.nt);
    parallel_for(grid.ns, threads, [&](std::size_t i) { jet1_[i] = c1_(s_at(i)); });
    parallel_for(grid.nt, threads, [&](std::size_t j) { jet2_[j] = c2_(t_at(j)); });
    points_.resize(grid.ns * grid.nt);
    for (std::size_t i = 0; i < grid.ns; ++i)
      for (std::size_t j = 0; j < grid.nt; ++j)
        points_[i * grid.nt + j] =
            Point4(jet1_[i].pos.x, jet1_[i].pos.y, jet2_[j].pos.x, jet2_[j].pos.y);
  }

  const FactorCurve &curve1() const { return c1_; }
  const FactorCurve &curve2() const { return c2_; }
  GridSize grid() const { return grid_; }
  std::size_t ns() const { return grid_.ns; }
  std::size_t nt() const { return grid_.nt; }
  double h_s() const { return c1_.period() / static_cast<double>(grid_.ns); }
  double h_t() const { return c2_.period() / static_cast<double>(grid_.nt); }
  double spacing() const { return std::max(h_s(), h_t()); }
  double s_at(std::size_t i) const { return h_s() * static_cast<double>(i); }
  double t_at(std::size_t j) const { return h_t() * static_cast<double>(j); }

  const std::vector<Point4> &points() const { return points_; }

  /// Periodic index access.
  const Point4 &at(std::ptrdiff_t i, std::ptrdiff_t j) const {
    const auto ns = static_cast<std::ptrdiff_t>(grid_.ns), nt = static_cast<std::ptrdiff_t>(grid_.nt);
    i %= ns;
    j %= nt;
    if (i < 0) i += ns;
    if (j < 0) j += nt;
    return points_[static_cast<std::size_t>(i) * grid_.nt + static_cast<std::size_t>(j)];
  }

  /// Exact jet from the factor curves.
  SurfaceJet analytic_jet(std::size_t i, std::size_t j) const {
    const CurveJet &a = jet1_[i], &b = jet2_[j];
    SurfaceJet jet;
    jet.F = points_[i * grid_.nt + j];
    jet.Fs = Point4(a.d1.x, a.d1.y, 0.0, 0.0);
    jet.Ft = Point4(0.0, 0.0, b.d1.x, b.d1.y);
    jet.Fss = Point4(a.d2.x, a.d2.y, 0.0, 0.0);
    jet.Fst = Point4();
    jet.Ftt = Point4(0.0, 0.0, b.d2.x, b.d2.y);
    return jet;
  }

  const CurveJet &factor1_jet(std::size_t i) const { return jet1_[i]; }
  const CurveJet &factor2_jet(std::size_t j) const { return jet2_[j]; }

private:
  FactorCurve c1_, c2_;
  GridSize grid_;
  std::vector<CurveJet> jet1_, jet2_;
  std::vector<Point4> points_;
};

/// Product immersion F(s, t) = (gamma1(s), gamma2(t)) of two closed shrinker curves.
inline ProductTorus build_torus(const ShrinkerCurve &c1, const ShrinkerCurve &c2, GridSize grid,
                                unsigned threads = 1, double closure_threshold = kClosureThreshold) {
  require(c1.size() >= 8 && c2.size() >= 8, ErrorKind::InputDomain, "factor curves need samples");
  require(c1.closure_error <= closure_threshold && c2.closure_error <= closure_threshold,
          ErrorKind::InputDomain, "factor curve is not closed (closure error above threshold)");
  return ProductTorus(FactorCurve::from_curve(c1), FactorCurve::from_curve(c2), grid, threads);
}

inline ProductTorus scale_torus(const ProductTorus &t, double factor, unsigned threads = 1) {
  return ProductTorus(t.curve1().scaled(factor), t.curve2().scaled(factor), t.grid(), threads);
}

// ---------------------------------------------------------------------------
// Periodic finite differences on the grid

enum class FdOrder { Second = 2, Fourth = 4, Sixth = 6 };

namespace detail {

template <class Get> auto fd_first(Get f, double h, FdOrder order) {
  if (order == FdOrder::Second) return (f(1) - f(-1)) / (2.0 * h);
  if (order == FdOrder::Fourth) return ((f(1) - f(-1)) * 8.0 - (f(2) - f(-2))) / (12.0 * h);
  return ((f(1) - f(-1)) * 45.0 - (f(2) - f(-2)) * 9.0 + (f(3) - f(-3))) / (60.0 * h);
}

template <class Get> auto fd_second(Get f, double h, FdOrder order) {
  if (order == FdOrder::Second) return (f(1) - f(0) * 2.0 + f(-1)) / (h * h);
  if (order == FdOrder::Fourth)
    return ((f(1) + f(-1)) * 16.0 - (f(2) + f(-2)) - f(0) * 30.0) / (12.0 * h * h);
  return ((f(1) + f(-1)) * 270.0 - (f(2) + f(-2)) * 27.0 + (f(3) + f(-3)) * 2.0 - f(0) * 490.0) /
         (180.0 * h * h);
}

} // namespace detail

/// Jet from periodic centred differences of the grid points.
inline SurfaceJet fd_jet(const ProductTorus &t, std::size_t i, std::size_t j, FdOrder order) {
  const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
  const double hs = t.h_s(), ht = t.h_t();
  SurfaceJet jet;
  jet.F = t.at(ii, jj);
  jet.Fs = detail::fd_first([&](int d) { return t.at(ii + d, jj); }, hs, order);
  jet.Ft = detail::fd_first([&](int d) { return t.at(ii, jj + d); }, ht, order);
  jet.Fss = detail::fd_second([&](int d) { return t.at(ii + d, jj); }, hs, order);
  jet.Ftt = detail::fd_second([&](int d) { return t.at(ii, jj + d); }, ht, order);
  jet.Fst = detail::fd_first(
      [&](int a) { return detail::fd_first([&](int b) { return t.at(ii + a, jj + b); }, ht, order); }, hs,
      order);
  return jet;
}

// ---------------------------------------------------------------------------
// Reports

struct VerificationEntry {
  std::string name;
  double max_residual = 0.0;
  std::size_t i = 0, j = 0; // argmax grid location
  double tol = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;

  bool pass() const {
    for (const auto &e : entries)
      if (!e.pass) return false;
    return true;
  }

  const VerificationEntry *find(const std::string &name) const {
    for (const auto &e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }

  void append(const VerificationReport &other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
};

inline VerificationEntry make_entry(std::string name, double residual, std::size_t i, std::size_t j,
                                    double tol) {
  return {std::move(name), residual, i, j, tol, residual <= tol};
}

/// Deterministic running maximum: NaN wins, ties keep the lowest linear index.
struct GridMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t i = 0, j = 0;

  void offer(double v, std::size_t vi, std::size_t vj) {
    if (std::isnan(value)) return;
    if (std::isnan(v) || v > value) {
      value = v;
      i = vi;
      j = vj;
    }
  }
  void merge(const GridMax &o) { o.value == -std::numeric_limits<double>::infinity() ? void() : offer(o.value, o.i, o.j); }
  VerificationEntry entry(std::string name, double tol) const {
    return make_entry(std::move(name), value, i, j, tol);
  }
};

/// Evaluates fn(i, j) -> array of K residuals on every grid point; rows run in
/// parallel, reduction is in row order.
template <std::size_t K, class Fn>
std::array<GridMax, K> grid_maxima(const ProductTorus &t, unsigned threads, Fn &&fn) {
  std::vector<std::array<GridMax, K>> rows(t.ns());
  parallel_for(t.ns(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < t.nt(); ++j) {
      const std::array<double, K> v = fn(i, j);
      for (std::size_t k = 0; k < K; ++k) rows[i][k].offer(v[k], i, j);
    }
  });
  std::array<GridMax, K> out{};
  for (const auto &row : rows)
    for (std::size_t k = 0; k < K; ++k) out[k].merge(row[k]);
  return out;
}

enum class JetSource { Analytic, FiniteDifference };

inline SurfaceJet torus_jet(const ProductTorus &t, std::size_t i, std::size_t j, JetSource src, FdOrder order) {
  return src == JetSource::Analytic ? t.analytic_jet(i, j) : fd_jet(t, i, j, order);
}

// Second-order shrinker residual of the Clifford torus divided by h^2.
inline constexpr double kFdCalibration = 0.36;
inline constexpr double kFdToleranceFloor = 1e-4;

/// Tolerance for finite-difference limited identities: C h^2 with C from the
/// Clifford torus, never below the fixed floor.
inline double fd_tolerance(double spacing, double floor = kFdToleranceFloor) {
  return std::max(floor, kFdCalibration * spacing * spacing);
}

/// max |H + F^perp| over the grid.
inline VerificationEntry shrinker_residual_surface(const ProductTorus &t, JetSource src = JetSource::Analytic,
                                                   FdOrder order = FdOrder::Fourth, double tol = 1e-6,
                                                   unsigned threads = 1) {
  const auto m = grid_maxima<1>(t, threads, [&](std::size_t i, std::size_t j) {
    // the chart must be isothermal; discrete jets only carry truncation error on top
    const SurfaceJet exact = t.analytic_jet(i, j);
    const SurfaceJet jet = src == JetSource::Analytic ? exact : fd_jet(t, i, j, order);
    if (src == JetSource::FiniteDifference) mean_curvature(exact);
    const Point4 H = mean_curvature(jet, std::numeric_limits<double>::infinity());
    return std::array<double, 1>{(H + normal_part(jet, jet.F)).norm()};
  });
  return m[0].entry(src == JetSource::Analytic ? "shrinker_residual" : "shrinker_residual_fd", tol);
}

/// max |omega(Fs, Ft)| and max |<J Fs, Ft>| over the grid.
inline VerificationReport lagrangian_residual(const ProductTorus &t, double tol = 1e-10, unsigned threads = 1) {
  const auto m = grid_maxima<2>(t, threads, [&](std::size_t i, std::size_t j) {
    const LagrangianDefect d = lagrangian_defect(t.analytic_jet(i, j));
    return std::array<double, 2>{std::abs(d.omega), std::abs(d.j_orthogonality)};
  });
  return {{m[0].entry("lagrangian_omega", tol), m[1].entry("lagrangian_j_orthogonality", tol)}};
}

namespace detail {

/// Item (3) quantities Im((Lap A + A) conj(A_s)), ... for a given Laplacian.
inline std::array<double, 4> laplacian_phase_terms(const SurfaceJet &jet, const Point4 &lap) {
  const Complex A = jet.F.a(), B = jet.F.b();
  const Complex lapA = lap.a() + A, lapB = lap.b() + B;
  return {std::abs((lapA * std::conj(jet.Fs.a())).imag()), std::abs((lapA * std::conj(jet.Ft.a())).imag()),
          std::abs((lapB * std::conj(jet.Fs.b())).imag()), std::abs((lapB * std::conj(jet.Ft.b())).imag())};
}

} // namespace detail

/// Isothermal local-equation residuals: five first-order items, the four
/// Laplacian phase terms with the analytic Laplacian, and the same four with
/// the periodic finite-difference Laplacian of the grid.
inline VerificationReport local_equation_residuals(const ProductTorus &t, double algebraic_tol = 1e-10,
                                           double analytic_tol = 1e-6, double fd_tol = 1e-4,
                                           FdOrder order = FdOrder::Fourth, unsigned threads = 1) {
  const auto m = grid_maxima<13>(t, threads, [&](std::size_t i, std::size_t j) {
    const SurfaceJet jet = t.analytic_jet(i, j);
    const SurfaceJet fd = fd_jet(t, i, j, order);
    const double lambda = 0.5 * (jet.Fs.norm_sq() + jet.Ft.norm_sq());
    const Complex As = jet.Fs.a(), At = jet.Ft.a(), Bs = jet.Fs.b(), Bt = jet.Ft.b();
    const Complex AsAt = As * std::conj(At), BsBt = Bs * std::conj(Bt);
    const auto exact = detail::laplacian_phase_terms(jet, (jet.Fss + jet.Ftt) / lambda);
    const auto discrete = detail::laplacian_phase_terms(jet, (fd.Fss + fd.Ftt) / lambda);
    return std::array<double, 13>{
        std::abs(std::abs(As) - std::abs(Bt)),
        std::abs(std::abs(At) - std::abs(Bs)),
        std::abs(AsAt + BsBt),
        std::abs(AsAt.imag()),
        std::abs(BsBt.imag()),
        exact[0], exact[1], exact[2], exact[3],
        discrete[0], discrete[1], discrete[2], discrete[3],
    };
  });
  static constexpr const char *names[13] = {
      "local_abs_As_eq_abs_Bt", "local_abs_At_eq_abs_Bs", "local_AsAt_plus_BsBt",
      "local_im_AsAt",          "local_im_BsBt",          "local_im_lapA_As",
      "local_im_lapA_At",       "local_im_lapB_Bs",       "local_im_lapB_Bt",
      "local_fd_im_lapA_As",    "local_fd_im_lapA_At",    "local_fd_im_lapB_Bs",
      "local_fd_im_lapB_Bt"};
  VerificationReport rep;
  for (std::size_t k = 0; k < 13; ++k)
    rep.entries.push_back(m[k].entry(names[k], k < 5 ? algebraic_tol : k < 9 ? analytic_tol : fd_tol));
  return rep;
}

/// |H|^2 and |sigma|^2 extrema over the grid (analytic jets).
struct CurvatureNorms {
  double h2_min, h2_max, sigma2_min, sigma2_max;
};

inline CurvatureNorms curvature_norms(const ProductTorus &t) {
  CurvatureNorms out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < t.ns(); ++i)
    for (std::size_t j = 0; j < t.nt(); ++j) {
      const SurfaceJet jet = t.analytic_jet(i, j);
      const double h2 = mean_curvature(jet).norm_sq();
      const double s2 = second_fundamental_norm_sq(jet);
      out.h2_min = std::min(out.h2_min, h2);
      out.h2_max = std::max(out.h2_max, h2);
      out.sigma2_min = std::min(out.sigma2_min, s2);
      out.sigma2_max = std::max(out.sigma2_max, s2);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Polar representation A = r1 e^{i theta1}, B = r2 e^{i theta2}

inline constexpr double kDegenerateRadius = 1e-9;

struct PolarField {
  std::size_t ns = 0, nt = 0;
  std::vector<double> r1, theta1, r2, theta2;
  // coordinate partials (d/ds, d/dt)
  std::vector<std::array<double, 2>> grad_r1, grad_theta1, grad_r2, grad_theta2;
  // inverse metric (g^ss, g^st, g^tt) at each point
  std::vector<std::array<double, 3>> inv_metric;
  std::optional<double> c_gamma1, c_gamma2;

  std::size_t index(std::size_t i, std::size_t j) const { return i * nt + j; }

  double dot(std::size_t k, const std::array<double, 2> &a, const std::array<double, 2> &b) const {
    const auto &g = inv_metric[k];
    return g[0] * a[0] * b[0] + g[1] * (a[0] * b[1] + a[1] * b[0]) + g[2] * a[1] * b[1];
  }
  double norm_sq(std::size_t k, const std::array<double, 2> &a) const { return dot(k, a, a); }
};

namespace detail {

/// Centred difference of the argument of a complex grid line, branch free.
template <class Get> double arg_derivative(Get z, double h, FdOrder order) {
  auto diff = [&](int a) { return std::arg(z(a) * std::conj(z(-a))); };
  if (order == FdOrder::Second) return diff(1) / (2.0 * h);
  if (order == FdOrder::Fourth) return (8.0 * diff(1) - diff(2)) / (12.0 * h);
  return (45.0 * diff(1) - 9.0 * diff(2) + diff(3)) / (60.0 * h);
}

} // namespace detail

/// Polar data of both factors. Gradients come from the analytic factor jets
/// (chain rule on A = r e^{i theta}) or from centred differences of r and of
/// the branch-free angle increments.
inline PolarField polar_fields(const ProductTorus &t, JetSource src = JetSource::Analytic,
                               FdOrder order = FdOrder::Sixth) {
  const std::size_t ns = t.ns(), nt = t.nt(), n = ns * nt;
  PolarField pf;
  pf.ns = ns;
  pf.nt = nt;
  pf.r1.resize(n);
  pf.theta1.resize(n);
  pf.r2.resize(n);
  pf.theta2.resize(n);
  pf.grad_r1.resize(n);
  pf.grad_theta1.resize(n);
  pf.grad_r2.resize(n);
  pf.grad_theta2.resize(n);
  pf.inv_metric.resize(n);
  if (const auto *c = t.curve1().source(); c && c->q != kNotAlCurve) pf.c_gamma1 = c->c_gamma;
  if (const auto *c = t.curve2().source(); c && c->q != kNotAlCurve) pf.c_gamma2 = c->c_gamma;

  double min_radius = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Point4 &p = t.points()[k];
    pf.r1[k] = std::abs(p.a());
    pf.r2[k] = std::abs(p.b());
    pf.theta1[k] = std::arg(p.a());
    pf.theta2[k] = std::arg(p.b());
    min_radius = std::min({min_radius, pf.r1[k], pf.r2[k]});
  }
  if (!(min_radius >= kDegenerateRadius)) {
    std::ostringstream msg;
    msg << "polar representation degenerates: min(|A|, |B|) = " << min_radius;
    fail(ErrorKind::DegenerateRadius, msg.str());
  }

  // continuous lifts: theta1 along s for every column, theta2 along t for every row
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 1; i < ns; ++i) {
      const std::size_t k = pf.index(i, j), km = pf.index(i - 1, j);
      pf.theta1[k] = pf.theta1[km] + wrap_angle(pf.theta1[k] - pf.theta1[km]);
    }
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 1; j < nt; ++j) {
      const std::size_t k = pf.index(i, j), km = pf.index(i, j - 1);
      pf.theta2[k] = pf.theta2[km] + wrap_angle(pf.theta2[k] - pf.theta2[km]);
    }

  const double hs = t.h_s(), ht = t.h_t();
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t k = pf.index(i, j);
      const SurfaceJet jet = t.analytic_jet(i, j);
      pf.inv_metric[k] = metric_of(jet).inverse();
      if (src == JetSource::Analytic) {
        // d|z| = Re(conj(z) dz) / |z|, d arg z = Im(conj(z) dz) / |z|^2
        const Complex A = jet.F.a(), B = jet.F.b();
        const double ra = pf.r1[k], rb = pf.r2[k];
        auto radial = [](Complex z, Complex dz, double r) { return (std::conj(z) * dz).real() / r; };
        auto angular = [](Complex z, Complex dz, double r) { return (std::conj(z) * dz).imag() / (r * r); };
        pf.grad_r1[k] = {radial(A, jet.Fs.a(), ra), radial(A, jet.Ft.a(), ra)};
        pf.grad_r2[k] = {radial(B, jet.Fs.b(), rb), radial(B, jet.Ft.b(), rb)};
        pf.grad_theta1[k] = {angular(A, jet.Fs.a(), ra), angular(A, jet.Ft.a(), ra)};
        pf.grad_theta2[k] = {angular(B, jet.Fs.b(), rb), angular(B, jet.Ft.b(), rb)};
        continue;
      }
      const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
      auto A_s = [&](int d) { return t.at(ii + d, jj).a(); };
      auto A_t = [&](int d) { return t.at(ii, jj + d).a(); };
      auto B_s = [&](int d) { return t.at(ii + d, jj).b(); };
      auto B_t = [&](int d) { return t.at(ii, jj + d).b(); };
      auto abs_of = [](auto f) { return [f](int d) { return std::abs(f(d)); }; };
      pf.grad_r1[k] = {detail::fd_first(abs_of(A_s), hs, order), detail::fd_first(abs_of(A_t), ht, order)};
      pf.grad_r2[k] = {detail::fd_first(abs_of(B_s), hs, order), detail::fd_first(abs_of(B_t), ht, order)};
      pf.grad_theta1[k] = {detail::arg_derivative(A_s, hs, order), detail::arg_derivative(A_t, ht, order)};
      pf.grad_theta2[k] = {detail::arg_derivative(B_s, hs, order), detail::arg_derivative(B_t, ht, order)};
    }
  return pf;
}

struct GlobalRelation {
  std::vector<double> C1, C2; // r^4 |grad theta|^2 e^{-r^2}
  double mean1 = 0.0, mean2 = 0.0;
  VerificationReport report;
};

/// Evaluates C_i = r_i^4 |grad theta_i|^2 exp(-r_i^2) and checks constancy,
/// positivity, the bound C <= 1/e, agreement with c_gamma^2 and the radius
/// bounds r_min(C) <= r_i <= r_max(C).
inline GlobalRelation global_relation_constants(const PolarField &pf, double fd_tol = 1e-4,
                                                double radius_tol = 1e-6) {
  const std::size_t n = pf.r1.size();
  GlobalRelation out;
  out.C1.resize(n);
  out.C2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r1 = pf.r1[k], r2 = pf.r2[k];
    out.C1[k] = std::pow(r1, 4) * pf.norm_sq(k, pf.grad_theta1[k]) * std::exp(-r1 * r1);
    out.C2[k] = std::pow(r2, 4) * pf.norm_sq(k, pf.grad_theta2[k]) * std::exp(-r2 * r2);
  }

  auto checks = [&](const std::vector<double> &C, const std::vector<double> &r, const std::string &tag,
                    std::optional<double> c_gamma, double &mean_out) {
    GridMax cmax, cmin_neg, bound, radius;
    double sum = 0.0;
    double cmin = std::numeric_limits<double>::infinity();
    std::size_t imin = 0, jmin = 0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += C[k];
      const std::size_t i = k / pf.nt, j = k % pf.nt;
      cmax.offer(C[k], i, j);
      if (C[k] < cmin) {
        cmin = C[k];
        imin = i;
        jmin = j;
      }
      bound.offer(C[k] - kInvE, i, j);
    }
    const double mean = sum / static_cast<double>(n);
    mean_out = mean;
    VerificationReport rep;
    const double spread = (cmax.value - cmin) / std::abs(mean);
    rep.entries.push_back(make_entry("global_" + tag + "_constancy", spread, cmax.i, cmax.j, fd_tol));
    rep.entries.push_back(make_entry("global_" + tag + "_positive", std::max(0.0, -cmin), imin, jmin, 0.0));
    rep.entries.back().pass = cmin > 0.0;
    rep.entries.push_back(make_entry("global_" + tag + "_below_inv_e", std::max(0.0, bound.value), bound.i,
                                     bound.j, fd_tol));
    if (c_gamma)
      rep.entries.push_back(
          make_entry("global_" + tag + "_equals_c_gamma_sq", std::abs(mean - *c_gamma * *c_gamma), 0, 0, fd_tol));
    if (mean > 0.0) {
      const auto [lo, hi] = radius_bounds(std::min(mean, kInvE));
      for (std::size_t k = 0; k < n; ++k)
        radius.offer(std::max({0.0, lo - r[k], r[k] - hi}), k / pf.nt, k % pf.nt);
      rep.entries.push_back(radius.entry("global_" + tag + "_radius_bounds", radius_tol));
    } else {
      rep.entries.push_back(make_entry("global_" + tag + "_radius_bounds",
                                       std::numeric_limits<double>::max(), 0, 0, radius_tol));
    }
    return rep;
  };
  out.report.append(checks(out.C1, pf.r1, "c1", pf.c_gamma1, out.mean1));
  out.report.append(checks(out.C2, pf.r2, "c2", pf.c_gamma2, out.mean2));
  return out;
}

/// Structure of the gradients: |grad r|^2 + r^2 |grad theta|^2 = 1 for each
/// factor, grad theta1 . grad theta2 = 0 and grad r_i parallel to grad theta_i.
inline VerificationReport polar_structure(const PolarField &pf, double algebraic_tol = 1e-10,
                                          double fd_tol = 1e-4) {
  GridMax unit1, unit2, orth, par1, par2;
  for (std::size_t k = 0; k < pf.r1.size(); ++k) {
    const std::size_t i = k / pf.nt, j = k % pf.nt;
    unit1.offer(std::abs(pf.norm_sq(k, pf.grad_r1[k]) + pf.r1[k] * pf.r1[k] * pf.norm_sq(k, pf.grad_theta1[k]) - 1.0), i, j);
    unit2.offer(std::abs(pf.norm_sq(k, pf.grad_r2[k]) + pf.r2[k] * pf.r2[k] * pf.norm_sq(k, pf.grad_theta2[k]) - 1.0), i, j);
    orth.offer(std::abs(pf.dot(k, pf.grad_theta1[k], pf.grad_theta2[k])), i, j);
    const auto cross = [](const std::array<double, 2> &a, const std::array<double, 2> &b) {
      return std::abs(a[0] * b[1] - a[1] * b[0]);
    };
    par1.offer(cross(pf.grad_r1[k], pf.grad_theta1[k]), i, j);
    par2.offer(cross(pf.grad_r2[k], pf.grad_theta2[k]), i, j);
  }
  return {{unit1.entry("polar_unit_speed_1", fd_tol), unit2.entry("polar_unit_speed_2", fd_tol),
           orth.entry("polar_grad_theta_orthogonal", algebraic_tol),
           par1.entry("polar_grad_parallel_1", algebraic_tol), par2.entry("polar_grad_parallel_2", algebraic_tol)}};
}

// ---------------------------------------------------------------------------
// Intrinsic curvature

/// Gauss curvature grid from the finite-difference metric (Brioschi formula).
inline std::vector<double> gauss_curvature_field(const ProductTorus &t, FdOrder order = FdOrder::Fourth) {
  const std::size_t ns = t.ns(), nt = t.nt();
  std::vector<Metric2> g(ns * nt);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
      const Point4 fs = detail::fd_first([&](int d) { return t.at(ii + d, jj); }, t.h_s(), order);
      const Point4 ft = detail::fd_first([&](int d) { return t.at(ii, jj + d); }, t.h_t(), order);
      g[i * nt + j] = Metric2{fs.dot(fs), fs.dot(ft), ft.dot(ft)};
    }
  auto G = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> const Metric2 & {
    const auto ns_ = static_cast<std::ptrdiff_t>(ns), nt_ = static_cast<std::ptrdiff_t>(nt);
    i = ((i % ns_) + ns_) % ns_;
    j = ((j % nt_) + nt_) % nt_;
    return g[static_cast<std::size_t>(i) * nt + static_cast<std::size_t>(j)];
  };
  std::vector<double> K(ns * nt);
  const double hs = t.h_s(), ht = t.h_t();
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
      auto comp = [&](auto member, int di, int dj) { return G(ii + di, jj + dj).*member; };
      auto du = [&](auto member) { return detail::fd_first([&](int d) { return comp(member, d, 0); }, hs, order); };
      auto dv = [&](auto member) { return detail::fd_first([&](int d) { return comp(member, 0, d); }, ht, order); };
      MetricJet m{};
      const Metric2 &c = G(ii, jj);
      m.E = c.E;
      m.F = c.F;
      m.G = c.G;
      m.E_u = du(&Metric2::E);
      m.E_v = dv(&Metric2::E);
      m.F_u = du(&Metric2::F);
      m.F_v = dv(&Metric2::F);
      m.G_u = du(&Metric2::G);
      m.G_v = dv(&Metric2::G);
      m.E_vv = detail::fd_second([&](int d) { return comp(&Metric2::E, 0, d); }, ht, order);
      m.G_uu = detail::fd_second([&](int d) { return comp(&Metric2::G, d, 0); }, hs, order);
      m.F_uv = detail::fd_first(
          [&](int a) { return detail::fd_first([&](int b) { return comp(&Metric2::F, a, b); }, ht, order); }, hs,
          order);
      K[i * nt + j] = brioschi(m);
    }
  return K;
}

inline VerificationEntry gauss_curvature(const ProductTorus &t, double tol = 1e-6, FdOrder order = FdOrder::Fourth) {
  const std::vector<double> K = gauss_curvature_field(t, order);
  GridMax m;
  for (std::size_t k = 0; k < K.size(); ++k) m.offer(std::abs(K[k]), k / t.nt(), k % t.nt());
  return m.entry("gauss_curvature", tol);
}

// ---------------------------------------------------------------------------
// Reflection symmetry

/// Symmetric nearest-neighbour distance between a point set and its mirror image.
inline double reflection_symmetry_residual(const std::vector<Point4> &points, const Hyperplane &h) {
  std::vector<Point4> mirrored(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) mirrored[k] = reflect(h, points[k]);
  const KdTree4 original(points), image(mirrored);
  double worst = 0.0;
  for (const Point4 &p : mirrored) worst = std::max(worst, original.nearest_distance(p));
  for (const Point4 &p : points) worst = std::max(worst, image.nearest_distance(p));
  return worst;
}

inline double reflection_symmetry_residual(const ProductTorus &t, const Hyperplane &h) {
  return reflection_symmetry_residual(t.points(), h);
}

/// Hyperplane through the reflection axis of factor 1's plane.
inline std::optional<Hyperplane> factor1_symmetry_plane(const ProductTorus &t) {
  const ShrinkerCurve *c = t.curve1().source();
  if (!c) return std::nullopt;
  const SymmetryAxis axis = find_symmetry_axis(*c);
  return Hyperplane(Point4(-std::sin(axis.angle), std::cos(axis.angle), 0.0, 0.0));
}

// ---------------------------------------------------------------------------
// Aggregate

struct ReportOptions {
  double algebraic_tol = 1e-10;
  double shrinker_tol = 1e-6;           // analytic jets
  std::optional<double> fd_tol;         // default: fd_tolerance(grid spacing)
  double relation_tol = 1e-4;           // constancy of the polar constants
  double gauss_tol = 1e-6;
  double radius_tol = 1e-6;
  double symmetry_factor = 2.0;         // multiples of the grid spacing
  FdOrder fd_order = FdOrder::Fourth;
  unsigned threads = 1;
  std::optional<Hyperplane> symmetry_plane; // default: reflection axis of factor 1
  bool symmetry = true;
};

/// Runs every check in a fixed order. A check that throws becomes a failed
/// entry carrying the largest finite residual.
inline VerificationReport full_report(const ProductTorus &t, const ReportOptions &opt = {}) {
  const double fd_tol = opt.fd_tol ? *opt.fd_tol : fd_tolerance(t.spacing());
  VerificationReport report;
  auto guarded = [&](const std::string &name, auto &&run) {
    try {
      run();
    } catch (const Error &) {
      report.entries.push_back(make_entry(name, std::numeric_limits<double>::max(), 0, 0, 0.0));
    }
  };
  guarded("shrinker_residual", [&] {
    report.entries.push_back(
        shrinker_residual_surface(t, JetSource::Analytic, opt.fd_order, opt.shrinker_tol, opt.threads));
  });
  guarded("shrinker_residual_fd", [&] {
    report.entries.push_back(
        shrinker_residual_surface(t, JetSource::FiniteDifference, opt.fd_order, fd_tol, opt.threads));
  });
  guarded("lagrangian_omega", [&] { report.append(lagrangian_residual(t, opt.algebraic_tol, opt.threads)); });
  guarded("local_equations", [&] {
    report.append(local_equation_residuals(t, opt.algebraic_tol, opt.shrinker_tol, fd_tol, opt.fd_order, opt.threads));
  });
  guarded("polar_fields", [&] {
    const PolarField pf = polar_fields(t);
    report.append(polar_structure(pf, opt.algebraic_tol, opt.shrinker_tol));
    report.append(global_relation_constants(pf, opt.relation_tol, opt.radius_tol).report);
  });
  guarded("gauss_curvature", [&] { report.entries.push_back(gauss_curvature(t, opt.gauss_tol, opt.fd_order)); });
  if (opt.symmetry) {
    guarded("reflection_symmetry", [&] {
      const std::optional<Hyperplane> plane = opt.symmetry_plane ? opt.symmetry_plane : factor1_symmetry_plane(t);
      if (!plane) return;
      report.entries.push_back(make_entry("reflection_symmetry", reflection_symmetry_residual(t, *plane), 0, 0,
                                          opt.symmetry_factor * t.spacing()));
    });
  }
  return report;
}

} // namespace lagshrink
