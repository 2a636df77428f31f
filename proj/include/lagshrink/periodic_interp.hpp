#pragma once

// Trigonometric interpolation of uniformly sampled periodic data. Used to
// resample closed curves and to locate extrema between samples.

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace lagshrink {

template <class V> struct PeriodicJet {
  V value{};
  V d1{};
  V d2{};
  V d3{};
};

/// Interpolant of samples f_j taken at u_j = period * j / n, j = 0..n-1.
/// V is any vector-space value type (double, Vec2, ...).
template <class V> class PeriodicInterpolant {
public:
  PeriodicInterpolant() = default;

  PeriodicInterpolant(const std::vector<V> &samples, double period)
      : period_(period), n_(samples.size()) {
    require(n_ >= 3, ErrorKind::InputDomain, "periodic interpolation needs >= 3 samples");
    require(period > 0.0, ErrorKind::InputDomain, "period must be positive");
    const std::size_t n = n_;
    modes_ = n / 2;
    std::vector<double> cos_table(n), sin_table(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      cos_table[j] = std::cos(a);
      sin_table[j] = std::sin(a);
    }
    a_.assign(modes_ + 1, V{});
    b_.assign(modes_ + 1, V{});
    for (std::size_t m = 0; m <= modes_; ++m) {
      V ca{}, sb{};
      std::size_t idx = 0;
      for (std::size_t j = 0; j < n; ++j) {
        ca = ca + samples[j] * cos_table[idx];
        sb = sb + samples[j] * sin_table[idx];
        idx += m;
        if (idx >= n) idx -= n;
      }
      const bool nyquist = (n % 2 == 0) && m == modes_;
      const double w = (m == 0 || nyquist) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
      a_[m] = ca * w;
      b_[m] = nyquist ? V{} : sb * w;
    }
  }

  double period() const { return period_; }
  std::size_t size() const { return n_; }

  PeriodicJet<V> evaluate(double u) const {
    const double omega = 2.0 * std::numbers::pi / period_;
    const double phase = omega * u;
    PeriodicJet<V> jet;
    jet.value = a_[0];
    const double c1 = std::cos(phase), s1 = std::sin(phase);
    double cm = 1.0, sm = 0.0;
    for (std::size_t m = 1; m <= modes_; ++m) {
      const double cn = cm * c1 - sm * s1;
      sm = sm * c1 + cm * s1;
      cm = cn;
      if (m % 64 == 0) { // re-anchor the recurrence
        cm = std::cos(static_cast<double>(m) * phase);
        sm = std::sin(static_cast<double>(m) * phase);
      }
      const double k = static_cast<double>(m) * omega;
      const V &a = a_[m];
      const V &b = b_[m];
      jet.value = jet.value + a * cm + b * sm;
      jet.d1 = jet.d1 + (b * cm - a * sm) * k;
      jet.d2 = jet.d2 - (a * cm + b * sm) * (k * k);
      jet.d3 = jet.d3 - (b * cm - a * sm) * (k * k * k);
    }
    return jet;
  }

  V operator()(double u) const { return evaluate(u).value; }

private:
  double period_ = 1.0;
  std::size_t n_ = 0;
  std::size_t modes_ = 0;
  std::vector<V> a_, b_;
};

} // namespace lagshrink
