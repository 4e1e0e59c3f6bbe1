#include "wrapbench/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace wrapbench {

namespace {
constexpr std::size_t kLeafSize = 12;
}

KdTree::KdTree(const std::vector<Eigen::Vector3d>& points) : points_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) build(0, order_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Eigen::Vector3d& query) const {
  Hit best{0, std::numeric_limits<double>::infinity()};
  if (!nodes_.empty()) nearest(0, query, best);
  return best;
}

void KdTree::nearest(int node, const Eigen::Vector3d& q, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const std::size_t idx = order_[i];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) best = {idx, d2};
    }
    return;
  }
  const double delta = q[n.axis] - n.split;
  const int near = delta < 0 ? n.left : n.right;
  const int far = delta < 0 ? n.right : n.left;
  nearest(near, q, best);
  if (delta * delta <= best.squared_distance) nearest(far, q, best);
}

std::vector<std::size_t> KdTree::within(const Eigen::Vector3d& query, double radius) const {
  std::vector<std::size_t> out;
  if (!nodes_.empty()) within(0, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::within(int node, const Eigen::Vector3d& q, double r2, std::vector<std::size_t>& out) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i)
      if ((points_[order_[i]] - q).squaredNorm() <= r2) out.push_back(order_[i]);
    return;
  }
  const double delta = q[n.axis] - n.split;
  if (delta <= 0 || delta * delta <= r2) within(n.left, q, r2, out);
  if (delta >= 0 || delta * delta <= r2) within(n.right, q, r2, out);
}

}  // namespace wrapbench
