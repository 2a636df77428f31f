#pragma once

// Curve-shortening flow and its Gaussian-rescaled variant for closed
// polylines, explicit Euler with uniform-arclength reparametrization.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "al_curve.hpp"
#include "error.hpp"
#include "vec2.hpp"

namespace lagshrink {

enum class FlowScheme { Csf, Rescaled };

inline const char *to_string(FlowScheme s) { return s == FlowScheme::Csf ? "csf" : "rescaled"; }

struct FlowDiagnostics {
  double length = 0.0;
  double area = 0.0; // signed, counter-clockwise positive
  double isoperimetric = 0.0;
  double shrinker_residual = 0.0;
};

struct FlowState {
  std::vector<Vec2> polyline;
  double tau = 0.0;

  std::size_t size() const { return polyline.size(); }
};

/// Step failure carrying the flow time at which it happened.
class FlowError : public Error {
public:
  FlowError(ErrorKind kind, const std::string &what, double tau) : Error(kind, what), tau_(tau) {}
  double tau() const noexcept { return tau_; }

private:
  double tau_;
};

inline constexpr double kStabilityFactor = 0.4;
inline constexpr double kCollapseLength = 1e-10;

inline double polyline_length(const std::vector<Vec2> &pts) {
  double len = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) len += (pts[(i + 1) % pts.size()] - pts[i]).norm();
  return len;
}

inline double polyline_area(const std::vector<Vec2> &pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * a;
}

inline double min_segment(const std::vector<Vec2> &pts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) m = std::min(m, (pts[(i + 1) % pts.size()] - pts[i]).norm());
  return m;
}

namespace detail {

/// Velocity at every vertex: k N, plus F^perp for the rescaled flow.
inline std::vector<Vec2> flow_velocity(const std::vector<Vec2> &pts, FlowScheme scheme) {
  const std::size_t n = pts.size();
  std::vector<Vec2> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = curve_fd_point(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
    v[i] = scheme == FlowScheme::Csf ? pt.curvature_vector : pt.curvature_vector + pt.normal_position;
  }
  return v;
}

} // namespace detail

inline FlowDiagnostics diagnose(const FlowState &state) {
  FlowDiagnostics d;
  d.length = polyline_length(state.polyline);
  d.area = polyline_area(state.polyline);
  d.isoperimetric = d.length * d.length / (4.0 * std::numbers::pi * std::abs(d.area));
  for (const Vec2 &v : detail::flow_velocity(state.polyline, FlowScheme::Rescaled))
    d.shrinker_residual = std::max(d.shrinker_residual, v.norm());
  return d;
}

/// Resamples a closed polyline at n points equally spaced in arclength,
/// starting at vertex 0. Cubic Hermite between vertices, knots at the chord
/// lengths, vertex tangents from the non-uniform three-point difference.
inline std::vector<Vec2> reparametrize(const std::vector<Vec2> &pts, std::size_t n = 0) {
  const std::size_t m = pts.size();
  if (n == 0) n = m;
  std::vector<double> s(m + 1, 0.0), h(m);
  for (std::size_t i = 0; i < m; ++i) {
    h[i] = (pts[(i + 1) % m] - pts[i]).norm();
    s[i + 1] = s[i] + h[i];
  }
  std::vector<Vec2> tan(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double hm = h[(i + m - 1) % m], hp = h[i];
    tan[i] = ((pts[(i + 1) % m] - pts[i]) * (hm / hp) + (pts[i] - pts[(i + m - 1) % m]) * (hp / hm)) / (hm + hp);
  }
  const double total = s[m];
  std::vector<Vec2> out(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < m && s[seg + 1] <= target) ++seg;
    const double u = (target - s[seg]) / h[seg];
    const double u2 = u * u, u3 = u2 * u;
    const Vec2 &p1 = pts[seg], &p2 = pts[(seg + 1) % m];
    out[k] = p1 * (2.0 * u3 - 3.0 * u2 + 1.0) + tan[seg] * (h[seg] * (u3 - 2.0 * u2 + u)) +
             p2 * (3.0 * u2 - 2.0 * u3) + tan[(seg + 1) % m] * (h[seg] * (u3 - u2));
  }
  return out;
}

/// One explicit Euler step followed by uniform-arclength reparametrization.
inline FlowState step_flow(const FlowState &state, double dt, FlowScheme scheme) {
  require(state.size() >= 8, ErrorKind::InputDomain, "flow needs at least 8 vertices");
  require(dt > 0.0, ErrorKind::InputDomain, "time step must be positive");
  const double h = min_segment(state.polyline);
  if (!(dt < kStabilityFactor * h * h)) {
    std::ostringstream msg;
    msg << "time step " << dt << " violates the stability bound 0.4 h^2 = " << kStabilityFactor * h * h;
    fail(ErrorKind::InputDomain, msg.str());
  }
  const std::vector<Vec2> v = detail::flow_velocity(state.polyline, scheme);
  FlowState next;
  next.tau = state.tau + dt;
  next.polyline.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) next.polyline[i] = state.polyline[i] + v[i] * dt;
  if (!(min_segment(next.polyline) >= kCollapseLength))
    fail(ErrorKind::NumericFailure, "polyline degenerated (segment collapse)");
  next.polyline = reparametrize(next.polyline);
  return next;
}

inline FlowState step_csf(const FlowState &state, double dt) { return step_flow(state, dt, FlowScheme::Csf); }
inline FlowState step_rescaled(const FlowState &state, double dt) {
  return step_flow(state, dt, FlowScheme::Rescaled);
}

struct TimeSample {
  double tau;
  FlowDiagnostics diag;
};

struct EvolveResult {
  FlowState state;
  std::vector<TimeSample> series;
  std::size_t steps = 0;
};

struct EvolveOptions {
  double dt = 1e-5;
  std::size_t sample_every = 100; // steps between time-series rows
  bool reparametrize_initial = true;
};

/// Steps until tau reaches T. The last step is shortened to land on T.
/// Once the run has started, a violated stability bound means the curve is
/// collapsing and is reported as a numeric failure.
inline EvolveResult evolve(const FlowState &initial, double T, FlowScheme scheme, const EvolveOptions &opt = {}) {
  require(T > 0.0, ErrorKind::InputDomain, "flow end time must be positive");
  require(opt.sample_every > 0, ErrorKind::InputDomain, "sample interval must be positive");
  EvolveResult out;
  out.state = initial;
  if (opt.reparametrize_initial) out.state.polyline = reparametrize(out.state.polyline);
  const double t_end = initial.tau + T;
  out.series.push_back({out.state.tau, diagnose(out.state)});
  const auto total_steps = static_cast<std::size_t>(std::ceil(T / opt.dt - 1e-9));
  for (std::size_t k = 0; k < total_steps; ++k) {
    const double dt = k + 1 == total_steps ? t_end - out.state.tau : opt.dt;
    try {
      if (k > 0) {
        const double h = min_segment(out.state.polyline);
        if (!(dt < kStabilityFactor * h * h))
          fail(ErrorKind::NumericFailure, "segment collapse (extinction)");
      }
      out.state = step_flow(out.state, dt, scheme);
    } catch (const Error &e) {
      std::ostringstream msg;
      msg << e.what() << " at tau = " << out.state.tau;
      throw FlowError(e.kind(), msg.str(), out.state.tau);
    }
    ++out.steps;
    if (out.steps % opt.sample_every == 0 || k + 1 == total_steps)
      out.series.push_back({out.state.tau, diagnose(out.state)});
  }
  return out;
}

inline double least_squares_slope(const std::vector<double> &x, const std::vector<double> &y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InputDomain, "slope needs matching samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Shape drift

inline double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.dot(d), 0.0, 1.0);
  return (p - (a + d * t)).norm();
}

/// max over the vertices of `from` of the distance to the polyline `to`.
inline double directed_distance(const std::vector<Vec2> &from, const std::vector<Vec2> &to) {
  double worst = 0.0;
  for (const Vec2 &p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < to.size(); ++i)
      best = std::min(best, point_segment_distance(p, to[i], to[(i + 1) % to.size()]));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff_distance(const std::vector<Vec2> &a, const std::vector<Vec2> &b) {
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

inline std::vector<Vec2> rotate_points(const std::vector<Vec2> &pts, double angle) {
  std::vector<Vec2> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i].rotated(angle);
  return out;
}

/// Hausdorff distance between two closed polylines after the best rotation
/// about the origin: coarse scan on a vertex subsample, then golden-section
/// refinement on the full sets.
inline double shape_drift(const std::vector<Vec2> &current, const std::vector<Vec2> &reference) {
  const std::size_t stride = std::max<std::size_t>(1, current.size() / 128);
  std::vector<Vec2> coarse;
  for (std::size_t i = 0; i < current.size(); i += stride) coarse.push_back(current[i]);
  constexpr int kScan = 180;
  const double step = 2.0 * std::numbers::pi / kScan;
  double best_angle = 0.0, best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double a = step * k;
    const double d = directed_distance(rotate_points(coarse, a), reference);
    if (d < best) {
      best = d;
      best_angle = a;
    }
  }
  auto cost = [&](double a) { return hausdorff_distance(rotate_points(current, a), reference); };
  double lo = best_angle - step, hi = best_angle + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = cost(x2);
    }
  }
  return std::min({f1, f2, cost(0.0)});
}

inline std::vector<Vec2> circle_polyline(double radius, std::size_t n, Vec2 centre = {}) {
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = centre + Vec2{std::cos(a), std::sin(a)} * radius;
  }
  return pts;
}

/// Polyline of a sampled curve resampled to n points uniform in arclength.
inline std::vector<Vec2> resample_curve(const ShrinkerCurve &curve, std::size_t n) {
  const PeriodicInterpolant<Vec2> interp(curve.polyline(), curve.length());
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = interp(curve.length() * static_cast<double>(i) / static_cast<double>(n));
  return pts;
}

} // namespace lagshrink
