#pragma once

// Self-intersections of closed polylines and the classification of product
// shrinker tori (embedded => Clifford torus).

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "al_curve.hpp"
#include "error.hpp"
#include "product_torus.hpp"
#include "vec2.hpp"

namespace lagshrink {

struct IntersectionRecord {
  std::size_t i = 0, j = 0; // segment indices, i < j, non-adjacent
  double x = 0.0, y = 0.0;
  bool transversal = true;

  auto key() const { return std::tie(i, j); }
  bool operator==(const IntersectionRecord &o) const {
    return i == o.i && j == o.j && x == o.x && y == o.y && transversal == o.transversal;
  }
};

inline constexpr double kCrossingDeterminant = 1e-12;

namespace detail {

inline void check_polyline(const std::vector<Vec2> &pts) {
  require(pts.size() >= 8, ErrorKind::InputDomain, "closed polyline needs at least 8 vertices");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 d = pts[(i + 1) % pts.size()] - pts[i];
    if (!(d.norm() > 0.0)) {
      std::ostringstream msg;
      msg << "zero-length segment at index " << i;
      fail(ErrorKind::InputDomain, msg.str());
    }
  }
}

inline bool adjacent(std::size_t i, std::size_t j, std::size_t n) {
  return i == j || (i + 1) % n == j || (j + 1) % n == i;
}

/// Segment pair test on half-open parameter ranges [0, 1) so shared vertices
/// are counted once. Near-parallel overlaps are reported as non-transversal.
inline bool segment_pair(const std::vector<Vec2> &pts, std::size_t i, std::size_t j, IntersectionRecord &rec) {
  const std::size_t n = pts.size();
  const Vec2 a = pts[i], b = pts[(i + 1) % n], c = pts[j], d = pts[(j + 1) % n];
  const Vec2 r = b - a, s = d - c, ac = c - a;
  const double det = cross(r, s);
  rec.i = i;
  rec.j = j;
  if (std::abs(det) > kCrossingDeterminant) {
    const double t = cross(ac, s) / det;
    const double u = cross(ac, r) / det;
    if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) return false;
    const Vec2 p = a + r * t;
    rec.x = p.x;
    rec.y = p.y;
    rec.transversal = true;
    return true;
  }
  // nearly parallel: only collinear overlaps count
  const double rr = r.dot(r);
  if (std::abs(cross(ac, r)) > kCrossingDeterminant * std::sqrt(rr)) return false;
  const double t0 = ac.dot(r) / rr, t1 = (d - a).dot(r) / rr;
  const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(1.0, std::max(t0, t1));
  if (lo > hi || lo >= 1.0) return false;
  const Vec2 p = a + r * (0.5 * (lo + hi));
  rec.x = p.x;
  rec.y = p.y;
  rec.transversal = false;
  return true;
}

} // namespace detail

/// Reference O(n^2) finder over all non-adjacent segment pairs.
inline std::vector<IntersectionRecord> self_intersections_brute(const std::vector<Vec2> &pts) {
  detail::check_polyline(pts);
  const std::size_t n = pts.size();
  std::vector<IntersectionRecord> out;
  IntersectionRecord rec;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (detail::adjacent(i, j, n)) continue;
      if (detail::segment_pair(pts, i, j, rec)) out.push_back(rec);
    }
  return out;
}

/// Sort-and-sweep finder: segments ordered by min x, pairs tested only when
/// their bounding boxes overlap. Same pair predicate as the reference finder.
inline std::vector<IntersectionRecord> self_intersections_sweep(const std::vector<Vec2> &pts) {
  detail::check_polyline(pts);
  const std::size_t n = pts.size();
  struct Box {
    double x0, x1, y0, y1;
    std::size_t idx;
  };
  std::vector<Box> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % n];
    boxes[i] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y), i};
  }
  std::sort(boxes.begin(), boxes.end(),
            [](const Box &l, const Box &r) { return std::tie(l.x0, l.idx) < std::tie(r.x0, r.idx); });
  std::vector<IntersectionRecord> out;
  IntersectionRecord rec;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n && boxes[b].x0 <= boxes[a].x1; ++b) {
      if (boxes[b].y0 > boxes[a].y1 || boxes[a].y0 > boxes[b].y1) continue;
      const std::size_t i = std::min(boxes[a].idx, boxes[b].idx), j = std::max(boxes[a].idx, boxes[b].idx);
      if (detail::adjacent(i, j, n)) continue;
      if (detail::segment_pair(pts, i, j, rec)) out.push_back(rec);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto &l, const auto &r) { return l.key() < r.key(); });
  return out;
}

inline std::vector<IntersectionRecord> curve_self_intersections(const ShrinkerCurve &curve) {
  return self_intersections_brute(curve.polyline());
}

inline std::size_t transversal_count(const std::vector<IntersectionRecord> &records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto &r) { return r.transversal; }));
}

// ---------------------------------------------------------------------------
// Classification

enum class TorusClass { CliffordTorus, ImmersedProductTorus };

inline const char *to_string(TorusClass c) {
  return c == TorusClass::CliffordTorus ? "CliffordTorus" : "ImmersedProductTorus";
}

struct FactorLabel {
  int p = 0, q = kNotAlCurve;
  double c_gamma = 0.0;
  std::size_t crossings = 0;
};

struct Classification {
  TorusClass kind = TorusClass::ImmersedProductTorus;
  FactorLabel factor1, factor2;
  double shrinker_residual = 0.0;
};

namespace detail {

/// Factor polyline and label, from the source curve when present, otherwise
/// from the torus grid.
inline FactorLabel label_factor(const ProductTorus &t, int which) {
  const FactorCurve &f = which == 1 ? t.curve1() : t.curve2();
  FactorLabel label;
  std::vector<Vec2> pts;
  if (const ShrinkerCurve *src = f.source()) {
    label.p = src->p;
    label.q = src->q;
    label.c_gamma = src->c_gamma;
    pts = src->polyline();
  } else {
    const std::size_t n = which == 1 ? t.ns() : t.nt();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const CurveJet &jet = which == 1 ? t.factor1_jet(i) : t.factor2_jet(i);
      pts.push_back(jet.pos);
      const double speed = jet.d1.norm();
      const double k = cross(jet.d1, jet.d2) / (speed * speed * speed);
      sum += k * std::exp(-0.5 * jet.pos.norm_sq());
    }
    label.c_gamma = sum / static_cast<double>(n);
  }
  label.crossings = transversal_count(self_intersections_brute(pts));
  return label;
}

} // namespace detail

inline constexpr double kCliffordConstantTolerance = 1e-6;

/// Requires the shrinker certificate, then decides embeddedness factorwise.
inline Classification classify_torus(const ProductTorus &t, double shrinker_tol = 1e-6, unsigned threads = 1) {
  Classification out;
  const VerificationEntry shrinker = shrinker_residual_surface(t, JetSource::Analytic, FdOrder::Fourth, shrinker_tol, threads);
  out.shrinker_residual = shrinker.max_residual;
  if (!shrinker.pass) {
    std::ostringstream msg;
    msg << "not a self-shrinker: max |H + F^perp| = " << shrinker.max_residual << " exceeds " << shrinker_tol;
    fail(ErrorKind::NotAShrinker, msg.str());
  }
  out.factor1 = detail::label_factor(t, 1);
  out.factor2 = detail::label_factor(t, 2);
  if (out.factor1.crossings == 0 && out.factor2.crossings == 0) {
    for (const FactorLabel *f : {&out.factor1, &out.factor2})
      if (std::abs(f->c_gamma - kInvSqrtE) > kCliffordConstantTolerance) {
        std::ostringstream msg;
        msg << "embedded factor with c_gamma = " << f->c_gamma << " is not the unit circle";
        fail(ErrorKind::NumericFailure, msg.str());
      }
    out.kind = TorusClass::CliffordTorus;
  }
  return out;
}

} // namespace lagshrink
