#pragma once

#include "scancov/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace scancov::geom {

/**
 * \brief Static KD-tree over 3D points: nearest neighbor and fixed-radius
 * queries. Results are identical to a brute-force scan (checked by tests).
 */
class KdTree3 {
 public:
  KdTree3() = default;

  explicit KdTree3(const std::vector<Vec3>& pts) { build(pts); }

  void build(const std::vector<Vec3>& pts) {
    points_ = pts;
    order_.resize(pts.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.clear();
    nodes_.reserve(pts.size() * 2 + 1);
    root_ = pts.empty() ? -1 : build_range(0, int(pts.size()));
  }

  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& point(int i) const { return points_[i]; }

  /// Index of the nearest point and its squared distance.
  std::pair<int, double> nearest(const Vec3& q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::max();
    if (root_ >= 0) search_nearest(root_, q, best, best_d2);
    return {best, best_d2};
  }

  /// All point indices within `radius` of q (unsorted but deterministic).
  std::vector<int> radius_query(const Vec3& q, double radius) const {
    std::vector<int> out;
    if (root_ >= 0) search_radius(root_, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf payload range in order_
    int axis = 0;
    double split = 0.0;
    bool leaf = false;
  };

  static constexpr int kLeafSize = 8;

  int build_range(int begin, int end) {
    Node n;
    if (end - begin <= kLeafSize) {
      n.leaf = true;
      n.begin = begin;
      n.end = end;
      nodes_.push_back(n);
      return int(nodes_.size()) - 1;
    }
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (int i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int a, int b) {
                       if (points_[a][axis] != points_[b][axis])
                         return points_[a][axis] < points_[b][axis];
                       return a < b;  // deterministic tie-break
                     });
    n.axis = axis;
    n.split = points_[order_[mid]][axis];
    const int self = int(nodes_.size());
    nodes_.push_back(n);
    const int l = build_range(begin, mid);
    const int r = build_range(mid, end);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void search_nearest(int ni, const Vec3& q, int& best, double& best_d2) const {
    const Node& n = nodes_[ni];
    if (n.leaf) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = order_[i];
        const double d2 = (points_[idx] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
          best_d2 = d2;
          best = idx;
        }
      }
      return;
    }
    const double delta = q[n.axis] - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search_nearest(near, q, best, best_d2);
    if (delta * delta <= best_d2) search_nearest(far, q, best, best_d2);
  }

  void search_radius(int ni, const Vec3& q, double r2, std::vector<int>& out) const {
    const Node& n = nodes_[ni];
    if (n.leaf) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = order_[i];
        if ((points_[idx] - q).squaredNorm() <= r2) out.push_back(idx);
      }
      return;
    }
    const double delta = q[n.axis] - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search_radius(near, q, r2, out);
    if (delta * delta <= r2) search_radius(far, q, r2, out);
  }

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace scancov::geom
