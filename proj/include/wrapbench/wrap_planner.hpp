#ifndef WRAPBENCH_WRAP_PLANNER_HPP
#define WRAPBENCH_WRAP_PLANNER_HPP

#include <cmath>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "wrapbench/rod_estimation.hpp"
#include "wrapbench/rope_tracing.hpp"

namespace wrapbench {

/// Spiral position in the rod cross-section frame (x, y in the section
/// plane, z along the axis).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> spiral_local(Scalar R, Scalar a, Scalar l_prime, Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar lever = two_pi * R + l_prime - theta * R;
  return {R * cos(theta) - lever * sin(theta), R * sin(theta) + lever * cos(theta), a * theta / two_pi};
}

/// Origin at the active cross-section on the axis; z along the axis toward
/// the free end, y pointing down, x = y cross z.
Eigen::Isometry3d rod_frame(const Eigen::Vector3d& center, const Eigen::Vector3d& axis, double axial_offset);

struct SpiralParams {
  double R = 0.0;        // m
  double a = 0.0;        // m per wrap
  double l_prime = 0.0;  // m
  int min_samples = 64;
  double max_step = 0.02;  // m, sample count grows so steps stay below this
  Eigen::Isometry3d frame = Eigen::Isometry3d::Identity();  // world_from_rod
  /// Gripper orientation at theta = 0.
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();

  /// Rope between the grasp point and the tangent point at theta = 0.
  double rope_length() const { return 2.0 * std::numbers::pi * R + l_prime; }
  int sample_count() const;
};

struct GripperPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  double theta = 0.0;
};

using ReachabilityModel = std::function<bool(const GripperPose&)>;

/// Closed axis-aligned box in the world frame.
struct WorkspaceBox {
  Eigen::Vector3d lo{0.15, -0.45, 0.0};
  Eigen::Vector3d hi{0.65, 0.45, 0.55};
  bool operator()(const GripperPose& pose) const {
    return (pose.position.array() >= lo.array()).all() && (pose.position.array() <= hi.array()).all();
  }
};

GripperPose spiral_point(const SpiralParams& params, double theta);

/// Uniform samples over [0, 2 pi] without the two endpoints. Throws
/// Unreachable naming the first infeasible theta.
std::vector<GripperPose> build_spiral(const SpiralParams& params, const ReachabilityModel& reach);

/// Largest feasible L' on a `step` grid from `hi` down to `lo`.
double search_safe_distance(SpiralParams params, double lo, double hi, const ReachabilityModel& reach,
                            double step = 0.005);

/// Lowers params.R by `step` until the spiral is reachable. Throws
/// RadiusUnderflow below r_rod / 2.
double shrink_radius_until_reachable(SpiralParams params, double r_rod, const ReachabilityModel& reach,
                                     double step = 0.005);

enum class Phase { Pick, Spiral, Release, Align };
std::string_view to_string(Phase phase);

struct WrapTrajectory {
  SpiralParams params;
  std::vector<GripperPose> pick;  // entry, grasp, connection
  std::vector<GripperPose> spiral;
  std::vector<GripperPose> release;  // last spiral pose, straightened, withdrawn
  std::vector<GripperPose> align;    // withdrawn, wrist turned 90 deg, pushed

  const std::vector<GripperPose>& phase(Phase p) const;
  bool complete() const { return !pick.empty() && !spiral.empty() && !release.empty(); }
};

struct AuxiliaryOptions {
  double entry_offset = 0.04;  // m
  double push_distance = 0.05;  // m
  double table_z = 0.0;
};

/// Gripper orientation holding the rope: z along `approach`, x along the rod.
Eigen::Quaterniond grasp_orientation(const Eigen::Vector3d& approach, const Eigen::Vector3d& axis);

WrapTrajectory auxiliary_waypoints(const GraspPose& grasp, std::vector<GripperPose> spiral,
                                   const SpiralParams& params, const RodEstimate& rod, double remaining_rope,
                                   const AuxiliaryOptions& options = {});

/// "# params R= a= Lprime=" header, then "phase theta x y z qw qx qy qz" lines.
void write_trajectory(std::ostream& out, const WrapTrajectory& trajectory);
WrapTrajectory read_trajectory(std::istream& in);

}  // namespace wrapbench

#endif  // WRAPBENCH_WRAP_PLANNER_HPP
