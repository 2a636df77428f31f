#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small non-stiff systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "error.hpp"

namespace lagshrink {

template <std::size_t N> using OdeState = std::array<double, N>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  std::size_t max_steps = 5'000'000;
};

namespace detail {

template <std::size_t N>
OdeState<N> axpy(const OdeState<N> &y, double h,
                 std::initializer_list<std::pair<double, const OdeState<N> *>> terms) {
  OdeState<N> r = y;
  for (const auto &[c, k] : terms)
    for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
  return r;
}

} // namespace detail

/// One Dormand-Prince step of size h. Returns the 5th-order solution and writes
/// the scaled error norm (<= 1 means acceptable) to err.
template <std::size_t N, class Rhs>
OdeState<N> dopri_step(const Rhs &f, double t, const OdeState<N> &y, double h,
                       const StepControl &ctl, double &err) {
  using detail::axpy;
  const OdeState<N> k1 = f(t, y);
  const OdeState<N> k2 = f(t + h / 5.0, axpy<N>(y, h, {{1.0 / 5.0, &k1}}));
  const OdeState<N> k3 =
      f(t + 3.0 * h / 10.0, axpy<N>(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
  const OdeState<N> k4 = f(t + 4.0 * h / 5.0,
                           axpy<N>(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
  const OdeState<N> k5 =
      f(t + 8.0 * h / 9.0, axpy<N>(y, h,
                                   {{19372.0 / 6561.0, &k1},
                                    {-25360.0 / 2187.0, &k2},
                                    {64448.0 / 6561.0, &k3},
                                    {-212.0 / 729.0, &k4}}));
  const OdeState<N> k6 = f(t + h, axpy<N>(y, h,
                                          {{9017.0 / 3168.0, &k1},
                                           {-355.0 / 33.0, &k2},
                                           {46732.0 / 5247.0, &k3},
                                           {49.0 / 176.0, &k4},
                                           {-5103.0 / 18656.0, &k5}}));
  const OdeState<N> y5 = axpy<N>(y, h,
                                 {{35.0 / 384.0, &k1},
                                  {500.0 / 1113.0, &k3},
                                  {125.0 / 192.0, &k4},
                                  {-2187.0 / 6784.0, &k5},
                                  {11.0 / 84.0, &k6}});
  const OdeState<N> k7 = f(t + h, y5);
  // difference between the 5th and embedded 4th order weights
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    sum += (e / scale) * (e / scale);
  }
  err = std::sqrt(sum / static_cast<double>(N));
  return y5;
}

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). `observer(t_prev, y_prev, t, y)`
/// is called after each accepted step; returning false stops early. `h` carries
/// the step size between calls. Returns the final time reached.
template <std::size_t N, class Rhs, class Observer>
double integrate_adaptive(const Rhs &f, OdeState<N> &y, double t0, double t1,
                          const StepControl &ctl, double &h, Observer &&observer) {
  double t = t0;
  if (!(h > 0.0)) h = ctl.initial_step;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > ctl.max_steps)
      fail(ErrorKind::NonConvergence, "ODE step budget exhausted");
    const bool last = t + h >= t1;
    const double step = last ? t1 - t : h;
    double err = 0.0;
    const OdeState<N> trial = dopri_step<N>(f, t, y, step, ctl, err);
    if (err <= 1.0) { // NaN falls through to rejection
      const OdeState<N> prev = y;
      const double t_prev = t;
      y = trial;
      t = last ? t1 : t + step;
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!last) h = step * grow;
      if (!observer(t_prev, prev, t, y)) return t;
    } else {
      h = std::isfinite(err) ? step * std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2 * step;
      if (h < ctl.min_step)
        fail(ErrorKind::NumericFailure, "ODE step size underflow");
    }
  }
  return t;
}

template <std::size_t N, class Rhs>
OdeState<N> integrate_to(const Rhs &f, OdeState<N> y, double t0, double t1,
                         const StepControl &ctl) {
  if (t1 <= t0) return y;
  double h = std::min(ctl.initial_step, t1 - t0);
  integrate_adaptive<N>(f, y, t0, t1, ctl, h,
                        [](double, const OdeState<N> &, double, const OdeState<N> &) { return true; });
  return y;
}

} // namespace lagshrink
