#pragma once

// Closed planar self-shrinking curves (Abresch-Langer curves).
//
// A curve is integrated in arclength from a point of minimal radius r0:
//   x' = cos(phi), y' = sin(phi), phi' = c * exp(r^2 / 2),  c = r0 * exp(-r0^2 / 2),
// starting at (r0, 0) with tangent (0, 1). Along any solution the quantity
// k + <F, N> is conserved, and it vanishes at the start, so every solution is a
// shrinker. The arc up to the next radial critical point is a half period; the
// closed curve is assembled from 2q reflected/rotated copies of it.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "ode.hpp"
#include "periodic_interp.hpp"
#include "vec2.hpp"

namespace lagshrink {

inline constexpr int kCircleQ = 0;     // q of the round circle
inline constexpr int kNotAlCurve = -1; // q of synthetic control curves
inline constexpr double kInvSqrtE = 0.60653065971263342360; // exp(-1/2)
inline constexpr double kInvE = 0.36787944117144233402;     // exp(-1)

struct CurveSample {
  double s = 0.0;
  double x = 0.0, y = 0.0;
  double phi = 0.0; // tangent angle, continuous along s
  double k = 0.0;   // signed curvature (left normal)
  double r = 0.0;
  double theta = 0.0; // polar angle, continuous along s

  Vec2 pos() const { return {x, y}; }
  Vec2 tangent() const { return {std::cos(phi), std::sin(phi)}; }
};

/// Sampled closed curve. `samples` holds n distinct samples on [0, L) followed
/// by a closing sample at s = L.
struct ShrinkerCurve {
  std::vector<CurveSample> samples;
  double c_gamma = 0.0;
  int p = 1;
  int q = kNotAlCurve;
  double r0 = 0.0;
  double r_min = 0.0, r_max = 0.0;
  double closure_error = 0.0;

  std::size_t size() const { return samples.empty() ? 0 : samples.size() - 1; }
  double length() const { return samples.back().s - samples.front().s; }
  bool is_circle() const { return q == kCircleQ; }

  std::vector<Vec2> polyline() const {
    std::vector<Vec2> pts;
    pts.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) pts.push_back(samples[i].pos());
    return pts;
  }
};

struct ShootingResult {
  double r0 = 0.0;
  double delta_theta = 0.0; // polar angle swept from r_min to r_max
  double half_length = 0.0; // arclength of the half period
  int iterations = 0;       // accepted ODE steps, or bisection steps in solve_curve
  bool converged = false;
  bool circle = false;
};

// ---------------------------------------------------------------------------
// Small helpers

inline double wrap_angle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

/// Lifts a sequence of angles to a continuous branch.
inline void unwrap_angles(std::vector<double> &angles) {
  for (std::size_t i = 1; i < angles.size(); ++i)
    angles[i] = angles[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
}

inline double curvature_from_radius(double c, double r) {
  require(c > 0.0, ErrorKind::InputDomain, "c_gamma must be positive");
  require(r >= 0.0, ErrorKind::InputDomain, "radius must be non-negative");
  return c * std::exp(0.5 * r * r);
}

/// c = r0 exp(-r0^2 / 2): the constant of the curve whose minimal radius is r0.
inline double c_gamma_from_r0(double r0) { return r0 * std::exp(-0.5 * r0 * r0); }

// ---------------------------------------------------------------------------
// Half-period integration

namespace detail {

struct ShrinkerRhs {
  double c;
  OdeState<3> operator()(double, const OdeState<3> &y) const {
    const double r2 = y[0] * y[0] + y[1] * y[1];
    return {std::cos(y[2]), std::sin(y[2]), c * std::exp(0.5 * r2)};
  }
};

inline double radial_speed(const OdeState<3> &y) {
  return y[0] * std::cos(y[2]) + y[1] * std::sin(y[2]);
}

} // namespace detail

/// Accepted integrator states of one half period, from r_min to r_max.
class HalfPeriod {
public:
  HalfPeriod(double c, StepControl control) : rhs_{c}, control_(control) {}

  double c() const { return rhs_.c; }
  const ShootingResult &result() const { return result_; }
  const std::vector<double> &knots() const { return s_; }
  const std::vector<OdeState<3>> &states() const { return y_; }

  /// (x, y, phi) at arclength sigma in [0, half_length], by re-integrating
  /// from the nearest stored knot at or before sigma.
  OdeState<3> state_at(double sigma) const {
    const auto it = std::upper_bound(s_.begin(), s_.end(), sigma);
    const std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    return integrate_to<3>(rhs_, y_[i], s_[i], sigma, control_);
  }

private:
  friend HalfPeriod integrate_half_period(double r0, const StepControl &control);
  detail::ShrinkerRhs rhs_;
  StepControl control_;
  std::vector<double> s_;
  std::vector<OdeState<3>> y_;
  ShootingResult result_;
};

/// Integrates from the minimal-radius point (r0, 0) until the radial speed
/// <F, T> changes sign, with the event located by bisection to 1e-12 in s.
/// r0 == 1 is the round circle; the result then carries the circle flag and
/// the limiting angle pi / sqrt(2).
inline HalfPeriod integrate_half_period(double r0, const StepControl &control = {}) {
  require(r0 > 0.0 && r0 <= 1.0, ErrorKind::InputDomain,
          "shooting radius r0 must lie in (0, 1]");
  const double c = c_gamma_from_r0(r0);
  HalfPeriod half(c, control);
  half.result_.r0 = r0;
  if (r0 == 1.0) {
    half.result_.circle = true;
    half.result_.converged = true;
    half.result_.delta_theta = std::numbers::pi / std::numbers::sqrt2;
    half.result_.half_length = std::numbers::pi / std::numbers::sqrt2;
    half.s_ = {0.0};
    half.y_ = {OdeState<3>{1.0, 0.0, 0.5 * std::numbers::pi}};
    return half;
  }

  const double budget = 10.0 * (2.0 * std::numbers::pi / r0);
  OdeState<3> y{r0, 0.0, 0.5 * std::numbers::pi};
  half.s_.push_back(0.0);
  half.y_.push_back(y);

  bool found = false;
  double s_lo = 0.0, s_hi = 0.0;
  OdeState<3> y_lo{};
  int steps = 0;
  double h = std::min(control.initial_step, 0.05 * r0);
  integrate_adaptive<3>(half.rhs_, y, 0.0, budget, control, h,
                        [&](double t_prev, const OdeState<3> &prev, double t, const OdeState<3> &cur) {
                          ++steps;
                          if (detail::radial_speed(cur) < 0.0) {
                            found = true;
                            s_lo = t_prev;
                            s_hi = t;
                            y_lo = prev;
                            return false;
                          }
                          half.s_.push_back(t);
                          half.y_.push_back(cur);
                          return true;
                        });
  if (!found)
    fail(ErrorKind::NonConvergence, "radial turning point not found within the arclength budget");

  // bisection on the sign of <F, T> inside the bracketing step
  double a = s_lo, b = s_hi;
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    const OdeState<3> ym = integrate_to<3>(half.rhs_, y_lo, s_lo, mid, control);
    if (detail::radial_speed(ym) > 0.0)
      a = mid;
    else
      b = mid;
  }
  const double s_event = 0.5 * (a + b);
  const OdeState<3> y_event = integrate_to<3>(half.rhs_, y_lo, s_lo, s_event, control);
  half.s_.push_back(s_event);
  half.y_.push_back(y_event);

  half.result_.half_length = s_event;
  half.result_.delta_theta = std::atan2(y_event[1], y_event[0]);
  half.result_.iterations = steps;
  half.result_.converged = true;
  return half;
}

/// Polar angle swept over a half period as a function of the minimal radius.
inline double delta_theta(double r0, const StepControl &control = {}) {
  return integrate_half_period(r0, control).result().delta_theta;
}

/// Value at 0 of the quadratic through (x_i, f_i).
inline double extrapolate_to_zero(const std::array<double, 3> &x, const std::array<double, 3> &f) {
  double out = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= x[j] / (x[j] - x[i]);
    out += w * f[i];
  }
  return out;
}

struct ShootingRange {
  double lower = 0.0; // limit of Delta theta as r0 -> 0
  double upper = 0.0; // limit as r0 -> 1
};

/// Endpoints of the closure of the range of Delta theta. Near 0 the deviation
/// decays like 1/r_max^2, so a quadratic in x = 1/r_max^2 is extrapolated from
/// tiny r0; near 1 a quadratic in 1 - r0 under tight integration tolerances.
inline ShootingRange extrapolate_shooting_range() {
  ShootingRange range;
  const std::array<double, 3> tiny{1e-40, 1e-80, 1e-150};
  std::array<double, 3> x{}, f{};
  for (int i = 0; i < 3; ++i) {
    const HalfPeriod half = integrate_half_period(tiny[i]);
    const OdeState<3> top = half.states().back();
    x[i] = 1.0 / (top[0] * top[0] + top[1] * top[1]);
    f[i] = half.result().delta_theta;
  }
  range.lower = extrapolate_to_zero(x, f);

  StepControl tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-15;
  const std::array<double, 3> eps{0.04, 0.02, 0.01};
  for (int i = 0; i < 3; ++i) f[i] = delta_theta(1.0 - eps[i], tight);
  range.upper = extrapolate_to_zero(eps, f);
  return range;
}

// ---------------------------------------------------------------------------
// Curve construction

inline ShrinkerCurve make_circle(std::size_t n = 2048) {
  require(n >= 3, ErrorKind::InputDomain, "circle needs at least 3 samples");
  ShrinkerCurve curve;
  curve.c_gamma = kInvSqrtE;
  curve.p = 1;
  curve.q = kCircleQ;
  curve.r0 = 1.0;
  curve.r_min = curve.r_max = 1.0;
  curve.closure_error = 0.0;
  curve.samples.reserve(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double s = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    const double x = j == n ? 1.0 : std::cos(s);
    const double y = j == n ? 0.0 : std::sin(s);
    curve.samples.push_back({s, x, y, s + 0.5 * std::numbers::pi, 1.0, 1.0, s});
  }
  return curve;
}

struct SolveOptions {
  std::size_t samples = 2048;
  StepControl control{};
  int max_bisections = 200;
};

inline bool admissible_ratio(int p, int q) {
  const double ratio = static_cast<double>(p) / static_cast<double>(q);
  return ratio > 0.5 && ratio < 1.0 / std::numbers::sqrt2;
}

namespace detail {

struct Bracket {
  double lo, hi;
  double f_lo, f_hi;
};

/// 64-point scan over [lo, hi]; Delta theta must increase strictly along it.
inline std::optional<Bracket> scan_bracket(double lo, double hi, double target,
                                           const StepControl &control) {
  constexpr int kPoints = 64;
  std::vector<double> r(kPoints), f(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    // geometric spacing towards both ends resolves the slow tails
    const double t = static_cast<double>(i) / (kPoints - 1);
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * t);
    r[i] = lo + (hi - lo) * w;
    f[i] = delta_theta(r[i], control);
    if (i > 0 && !(f[i] > f[i - 1]))
      fail(ErrorKind::NumericFailure, "shooting map is not monotone on the scan grid");
  }
  for (int i = 0; i + 1 < kPoints; ++i)
    if (f[i] <= target && target <= f[i + 1]) return Bracket{r[i], r[i + 1], f[i], f[i + 1]};
  return std::nullopt;
}

} // namespace detail

/// Closed curve with rotation index p made of 2q half periods, i.e. Delta theta = pi p / q.
inline ShrinkerCurve assemble_curve(const HalfPeriod &half, int p, int q, std::size_t n) {
  const ShootingResult &res = half.result();
  const double ell = res.half_length;
  const double dth = res.delta_theta;
  const double length = 2.0 * q * ell;
  const double c = half.c();
  const int halves = 2 * q;

  ShrinkerCurve curve;
  curve.c_gamma = c;
  curve.p = p;
  curve.q = q;
  curve.r0 = res.r0;
  curve.samples.resize(n + 1);

  // sample s_j = j L / n lives in half period m at local arclength sigma
  std::vector<int> half_index(n + 1);
  std::vector<double> local(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double s = length * static_cast<double>(j) / static_cast<double>(n);
    int m = static_cast<int>(std::floor(s / ell));
    m = std::clamp(m, 0, halves - 1);
    const double sigma = s - m * ell;
    half_index[j] = m;
    local[j] = (m % 2 == 0) ? sigma : ell - sigma;
    curve.samples[j].s = s;
  }

  for (std::size_t j = 0; j <= n; ++j) {
    const int m = half_index[j];
    const OdeState<3> st = half.state_at(std::clamp(local[j], 0.0, ell));
    const double theta_local = std::atan2(st[1], st[0]);
    CurveSample &out = curve.samples[j];
    Vec2 pos;
    if (m % 2 == 0) {
      const double rot = m * dth; // = 2 (m/2) dth
      pos = Vec2{st[0], st[1]}.rotated(rot);
      out.phi = rot + st[2];
      out.theta = rot + theta_local;
    } else {
      const double rot = (m + 1) * dth;
      pos = Vec2{st[0], -st[1]}.rotated(rot);
      out.phi = rot + std::numbers::pi - st[2];
      out.theta = rot - theta_local;
    }
    out.x = pos.x;
    out.y = pos.y;
    out.r = pos.norm();
    // curvature required by the shrinker equation, k = -<F, N>; it agrees with
    // c exp(r^2/2) up to the conservation error of the integration
    const Vec2 normal{-std::sin(out.phi), std::cos(out.phi)};
    out.k = -pos.dot(normal);
  }

  curve.r_min = res.r0;
  const OdeState<3> top = half.states().back();
  curve.r_max = std::hypot(top[0], top[1]);
  const CurveSample &first = curve.samples.front();
  const CurveSample &last = curve.samples.back();
  curve.closure_error = std::hypot(last.x - first.x, last.y - first.y) +
                        std::abs(last.phi - first.phi - 2.0 * std::numbers::pi * p);
  return curve;
}

/// Solves Delta theta(r0) = pi p / q by bisection and assembles the closed curve.
inline ShrinkerCurve solve_curve(int p, int q, double tol = 1e-11,
                                 const SolveOptions &options = {},
                                 ShootingResult *shooting = nullptr) {
  require(p >= 1 && q >= 1, ErrorKind::InputDomain, "p and q must be positive");
  require(std::gcd(p, q) == 1, ErrorKind::InputDomain, "p and q must be coprime");
  require(tol > 0.0, ErrorKind::InputDomain, "tolerance must be positive");
  require(options.samples >= 8, ErrorKind::InputDomain, "need at least 8 samples");
  if (!admissible_ratio(p, q)) {
    std::ostringstream msg;
    msg << "ratio outside admissible range: p/q = " << p << "/" << q
        << " must lie strictly between 1/2 and 1/sqrt(2)";
    if (2 * p == q) msg << " (the boundary ratio 1/2 is the round circle; use make-circle)";
    fail(ErrorKind::NoSolution, msg.str());
  }
  const double target = std::numbers::pi * p / q;
  const StepControl &ctl = options.control;

  detail::Bracket br{0.02, 0.999, delta_theta(0.02, ctl), delta_theta(0.999, ctl)};
  if (!(br.f_lo <= target && target <= br.f_hi)) {
    auto wide = detail::scan_bracket(1e-4, 1.0 - 1e-7, target, ctl);
    if (!wide)
      fail(ErrorKind::NumericFailure, "no monotone bracket for the requested ratio");
    br = *wide;
  }

  int it = 0;
  double r0 = 0.5 * (br.lo + br.hi);
  double f = 0.0;
  for (;; ++it) {
    if (it >= options.max_bisections)
      fail(ErrorKind::NonConvergence, "shooting bisection did not converge");
    r0 = 0.5 * (br.lo + br.hi);
    f = delta_theta(r0, ctl);
    if (std::abs(f - target) < tol) break;
    if (f < target)
      br.lo = r0;
    else
      br.hi = r0;
    if (br.hi - br.lo < 4.0 * std::numeric_limits<double>::epsilon())
      fail(ErrorKind::NonConvergence, "shooting bracket collapsed before reaching tolerance");
  }

  const HalfPeriod half = integrate_half_period(r0, ctl);
  if (shooting) {
    *shooting = half.result();
    shooting->iterations = it + 1;
  }
  return assemble_curve(half, p, q, options.samples);
}

/// Closed curve through the given points (control fixtures, not shrinkers):
/// chord-length s, centred-difference tangent angle and turning-rate curvature.
inline ShrinkerCurve closed_curve_from_points(const std::vector<Vec2> &pts, int p = 1) {
  const std::size_t n = pts.size();
  require(n >= 5, ErrorKind::InputDomain, "closed curve needs at least 5 points");
  ShrinkerCurve curve;
  curve.p = p;
  curve.q = kNotAlCurve;
  curve.samples.resize(n + 1);
  std::vector<double> phi(n + 1), theta(n + 1);
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const Vec2 &x = pts[i % n];
    const Vec2 d = pts[(i + 1) % n] - pts[(i + n - 1) % n];
    phi[i] = std::atan2(d.y, d.x);
    theta[i] = std::atan2(x.y, x.x);
    curve.samples[i].s = s;
    curve.samples[i].x = x.x;
    curve.samples[i].y = x.y;
    curve.samples[i].r = x.norm();
    s += (pts[(i + 1) % n] - x).norm();
  }
  unwrap_angles(phi);
  unwrap_angles(theta);
  for (std::size_t i = 0; i <= n; ++i) {
    curve.samples[i].phi = phi[i];
    curve.samples[i].theta = theta[i];
    const Vec2 a = pts[(i + n - 1) % n], b = pts[i % n], c = pts[(i + 1) % n];
    const double turn = wrap_angle(std::atan2((c - b).y, (c - b).x) - std::atan2((b - a).y, (b - a).x));
    curve.samples[i].k = 2.0 * turn / ((c - b).norm() + (b - a).norm());
  }
  double rmin = curve.samples[0].r, rmax = rmin;
  for (const auto &smp : curve.samples) {
    rmin = std::min(rmin, smp.r);
    rmax = std::max(rmax, smp.r);
  }
  curve.r_min = rmin;
  curve.r_max = rmax;
  curve.r0 = rmin;
  return curve;
}

// ---------------------------------------------------------------------------
// Certificates

/// max |k exp(-r^2/2) - c_gamma| over the samples
inline double verify_transcendental(const ShrinkerCurve &curve) {
  double worst = 0.0;
  for (const auto &smp : curve.samples)
    worst = std::max(worst, std::abs(smp.k * std::exp(-0.5 * smp.r * smp.r) - curve.c_gamma));
  return worst;
}

/// Periodic trapezoid rule for the integral of k ds (spectrally accurate on
/// uniformly sampled smooth curves).
inline double total_turning(const ShrinkerCurve &curve) {
  double sum = 0.0;
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = 0.5 * (curve.samples[i + 1].s - curve.samples[i == 0 ? n - 1 : i - 1].s +
                             (i == 0 ? curve.length() : 0.0));
    sum += curve.samples[i].k * ds;
  }
  return sum;
}

struct CurveResidualPoint {
  Vec2 curvature_vector; // centred second difference
  Vec2 tangent;          // normalized centred first difference
  Vec2 normal_position;  // F^perp = F - <F, T> T
};

/// Centred second difference of position with parameter steps hm, hp
/// (non-uniform three-point stencil).
inline CurveResidualPoint curve_fd_point(const Vec2 &prev, const Vec2 &cur, const Vec2 &next, double hm,
                                         double hp) {
  const Vec2 dm = cur - prev, dp = next - cur;
  CurveResidualPoint out;
  out.curvature_vector = (dp / hp - dm / hm) * (2.0 / (hp + hm));
  const Vec2 chord = next - prev;
  out.tangent = chord / chord.norm();
  out.normal_position = cur - out.tangent * cur.dot(out.tangent);
  return out;
}

/// Same, parametrized by chord length (polylines without an arclength).
inline CurveResidualPoint curve_fd_point(const Vec2 &prev, const Vec2 &cur, const Vec2 &next) {
  return curve_fd_point(prev, cur, next, (cur - prev).norm(), (next - cur).norm());
}

/// max |k N + F^perp| with k N from centred finite differences of position
/// in the sample arclength s, and F^perp taken against the sample tangent.
inline double shrinker_residual_curve(const ShrinkerCurve &curve) {
  const std::size_t n = curve.size();
  require(n >= 5, ErrorKind::InputDomain, "shrinker residual needs at least 5 samples");
  const double L = curve.length();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    const double hm = i == 0 ? L - curve.samples[n - 1].s + curve.samples[0].s
                             : curve.samples[i].s - curve.samples[im].s;
    const double hp = curve.samples[i + 1].s - curve.samples[i].s;
    const auto pt = curve_fd_point(curve.samples[im].pos(), curve.samples[i].pos(),
                                   curve.samples[(i + 1) % n].pos(), hm, hp);
    const Vec2 F = curve.samples[i].pos(), T = curve.samples[i].tangent();
    worst = std::max(worst, (pt.curvature_vector + F - T * F.dot(T)).norm());
  }
  return worst;
}

/// Local extrema of k along s, refined between samples on the trigonometric
/// interpolant of k. A curve of constant curvature reports every sample.
inline std::vector<double> critical_curvatures(const ShrinkerCurve &curve) {
  const std::size_t n = curve.size();
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = curve.samples[i].k;
  const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) return k;

  const PeriodicInterpolant<double> interp(k, static_cast<double>(n));
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = k[i] - k[(i + n - 1) % n];
    const double dr = k[(i + 1) % n] - k[i];
    const bool is_max = dl > 0.0 && dr <= 0.0;
    const bool is_min = dl < 0.0 && dr >= 0.0;
    if (!is_max && !is_min) continue;
    double u = static_cast<double>(i);
    for (int it = 0; it < 20; ++it) {
      const auto jet = interp.evaluate(u);
      if (jet.d2 == 0.0) break;
      const double step = std::clamp(jet.d1 / jet.d2, -1.0, 1.0);
      u -= step;
      if (std::abs(step) < 1e-13) break;
    }
    out.push_back(interp(u));
  }
  return out;
}

/// Roots r_min <= 1 <= r_max of r^2 = C exp(r^2).
inline std::pair<double, double> radius_bounds(double C) {
  require(C > 0.0, ErrorKind::InputDomain, "radius bounds need C > 0");
  if (C > kInvE * (1.0 + 1e-15))
    fail(ErrorKind::NoSolution, "r^2 = C exp(r^2) has no solution for C > 1/e");
  if (C >= kInvE) return {1.0, 1.0};
  const auto g = [C](double r) { return r * r * std::exp(-r * r) - C; }; // > 0 between the roots
  auto bisect = [&](double a, double b) {
    // g(a) and g(b) have opposite signs
    const bool rising = g(a) < 0.0;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      if ((g(m) < 0.0) == rising)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  };
  double hi = 2.0;
  while (g(hi) > 0.0) hi *= 2.0;
  return {bisect(0.0, 1.0), bisect(1.0, hi)};
}

// ---------------------------------------------------------------------------
// Symmetry axis

struct SymmetryAxis {
  double angle = 0.0;    // direction of the reflection axis (line through O)
  double rotation = 0.0; // rotation taking the axis onto the y axis
  double residual = 0.0; // max distance of reflected samples from the curve
};

/// Reflection axis through a radially critical point, located on the
/// trigonometric interpolant of the samples, and its symmetry residual.
inline SymmetryAxis find_symmetry_axis(const ShrinkerCurve &curve) {
  const std::size_t n = curve.size();
  require(n >= 8, ErrorKind::InputDomain, "symmetry search needs at least 8 samples");
  const std::vector<Vec2> pts = curve.polyline();
  const PeriodicInterpolant<Vec2> interp(pts, static_cast<double>(n));

  std::size_t imin = 0;
  double rlo = pts[0].norm(), rhi = rlo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pts[i].norm();
    if (r < rlo) {
      rlo = r;
      imin = i;
    }
    rhi = std::max(rhi, r);
  }
  Vec2 critical = pts[imin];
  if (rhi - rlo > 1e-12 * rhi) {
    // Newton on <P, P'> = 0
    double u = static_cast<double>(imin);
    for (int it = 0; it < 30; ++it) {
      const auto jet = interp.evaluate(u);
      const double f = jet.value.dot(jet.d1);
      const double df = jet.d1.norm_sq() + jet.value.dot(jet.d2);
      if (df == 0.0) break;
      const double step = std::clamp(f / df, -1.0, 1.0);
      u -= step;
      if (std::abs(step) < 1e-14) break;
    }
    critical = interp(u);
  }
  require(critical.norm() > 0.0, ErrorKind::SymmetryNotFound, "critical point at the origin");

  SymmetryAxis axis;
  axis.angle = std::atan2(critical.y, critical.x);
  axis.rotation = 0.5 * std::numbers::pi - axis.angle;

  // mirror across the axis line: R(2 alpha) * conj
  const double c2 = std::cos(2.0 * axis.angle), s2 = std::sin(2.0 * axis.angle);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 m{c2 * pts[i].x + s2 * pts[i].y, s2 * pts[i].x - c2 * pts[i].y};
    std::size_t best = 0;
    double best_d = (pts[0] - m).norm_sq();
    for (std::size_t j = 1; j < n; ++j) {
      const double d = (pts[j] - m).norm_sq();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    double u = static_cast<double>(best);
    double dist = std::sqrt(best_d);
    for (int it = 0; it < 20; ++it) {
      const auto jet = interp.evaluate(u);
      const Vec2 diff = jet.value - m;
      const double f = diff.dot(jet.d1);
      const double df = jet.d1.norm_sq() + diff.dot(jet.d2);
      dist = std::min(dist, diff.norm());
      if (df <= 0.0) break;
      const double step = std::clamp(f / df, -0.5, 0.5);
      u -= step;
      if (std::abs(step) < 1e-14) break;
    }
    dist = std::min(dist, (interp(u) - m).norm());
    worst = std::max(worst, dist);
  }
  axis.residual = worst;
  return axis;
}

inline ShrinkerCurve rotate_curve(const ShrinkerCurve &curve, double angle) {
  ShrinkerCurve out = curve;
  for (auto &smp : out.samples) {
    const Vec2 p = smp.pos().rotated(angle);
    smp.x = p.x;
    smp.y = p.y;
    smp.phi += angle;
    smp.theta += angle;
  }
  return out;
}

/// Rotates the curve so that a reflection axis is the y axis, making the
/// sample set invariant under (x, y) -> (-x, y).
inline ShrinkerCurve align_symmetry_axis(const ShrinkerCurve &curve, double threshold = 1e-6) {
  const SymmetryAxis axis = find_symmetry_axis(curve);
  if (!(axis.residual <= threshold)) {
    std::ostringstream msg;
    msg << "no reflection axis: best symmetry residual " << axis.residual;
    fail(ErrorKind::SymmetryNotFound, msg.str());
  }
  return rotate_curve(curve, axis.rotation);
}

} // namespace lagshrink
