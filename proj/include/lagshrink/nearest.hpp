#pragma once

// Static k-d tree over Point4 for nearest-neighbour distances.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "core_geometry.hpp"

namespace lagshrink {

class KdTree4 {
public:
  explicit KdTree4(std::vector<Point4> points) : pts_(std::move(points)) {
    idx_.resize(pts_.size());
    std::iota(idx_.begin(), idx_.end(), std::uint32_t{0});
    build(0, idx_.size(), 0);
  }

  std::size_t size() const { return pts_.size(); }

  /// Euclidean distance from q to the closest stored point.
  double nearest_distance(const Point4 &q) const {
    double best = std::numeric_limits<double>::infinity();
    if (!idx_.empty()) search(0, idx_.size(), 0, q, best);
    return std::sqrt(best);
  }

private:
  void build(std::size_t lo, std::size_t hi, int depth) {
    if (hi - lo <= kLeaf) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const int axis = depth % 4;
    std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(lo),
                     idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::uint32_t a, std::uint32_t b) { return pts_[a][axis] < pts_[b][axis]; });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(std::size_t lo, std::size_t hi, int depth, const Point4 &q, double &best) const {
    if (hi - lo <= kLeaf) {
      for (std::size_t i = lo; i < hi; ++i) best = std::min(best, (pts_[idx_[i]] - q).norm_sq());
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const int axis = depth % 4;
    const Point4 &pivot = pts_[idx_[mid]];
    best = std::min(best, (pivot - q).norm_sq());
    const double diff = q[axis] - pivot[axis];
    const bool left_first = diff < 0.0;
    if (left_first)
      search(lo, mid, depth + 1, q, best);
    else
      search(mid + 1, hi, depth + 1, q, best);
    if (diff * diff < best) {
      if (left_first)
        search(mid + 1, hi, depth + 1, q, best);
      else
        search(lo, mid, depth + 1, q, best);
    }
  }

  static constexpr std::size_t kLeaf = 8;
  std::vector<Point4> pts_;
  std::vector<std::uint32_t> idx_;
};

} // namespace lagshrink
