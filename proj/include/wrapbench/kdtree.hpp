#ifndef WRAPBENCH_KDTREE_HPP
#define WRAPBENCH_KDTREE_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace wrapbench {

/// Static 3-d tree over a borrowed point array. The points must outlive the
/// tree and must not change.
class KdTree {
 public:
  explicit KdTree(const std::vector<Eigen::Vector3d>& points);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };

  /// Nearest point; ties go to the lower index. Undefined on an empty tree.
  Hit nearest(const Eigen::Vector3d& query) const;
  /// Indices within `radius` (inclusive), in ascending index order.
  std::vector<std::size_t> within(const Eigen::Vector3d& query, double radius) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void nearest(int node, const Eigen::Vector3d& q, Hit& best) const;
  void within(int node, const Eigen::Vector3d& q, double r2, std::vector<std::size_t>& out) const;

  const std::vector<Eigen::Vector3d>& points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace wrapbench

#endif  // WRAPBENCH_KDTREE_HPP
