#ifndef WRAPBENCH_ROD_ESTIMATION_HPP
#define WRAPBENCH_ROD_ESTIMATION_HPP

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "wrapbench/imaging.hpp"

namespace wrapbench {

struct RodEstimate {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitY();
  double radius = 0.0;  // m
  double length = 0.0;  // m
  /// Q' with P' attached: every sample inside the inscribed rectangle.
  std::vector<MapSample> region;
  AxisRect rect;
  /// Image rows/columns of the rod silhouette (rod-hue coverage).
  AxisRect silhouette;
  double rod_hue = 0.0;
  double rms = 0.0;

  std::vector<Pixel> pixels() const;
  std::vector<Eigen::Vector3d> points() const;
};

/// "center= axis= radius= length=" record.
std::string to_record(const RodEstimate& rod);

ColorizedDepthMap subtract_background(const ColorizedDepthMap& map, double robot_plane_x, double table_z);

/// Centroid of every occupied voxel, in order of first occupation.
std::vector<Eigen::Vector3d> voxel_downsample(const std::vector<Eigen::Vector3d>& points, double edge = 0.005);

inline constexpr int kNoise = -1;

struct ClusterLabeling {
  std::vector<int> labels;
  int clusters = 0;
  double eps = 0.0;
  int min_pts = 0;
};

/// DBSCAN; a point's neighbourhood includes itself. Clusters are numbered in
/// the order their first core point appears.
ClusterLabeling dbscan(const std::vector<Eigen::Vector3d>& points, double eps = 0.02, int min_pts = 8);

int nearest_cluster(const ClusterLabeling& labeling, const std::vector<Eigen::Vector3d>& points,
                    const Eigen::Vector3d& camera);

struct HueSplit {
  std::vector<std::size_t> members;  // indices of the kept cluster
  double mean_hue = 0.0;
  double spread = 0.0;  // circular std-dev, degrees
};

/// Circular 2-means on hue; keeps the larger cluster, the smaller mean hue
/// on a tie.
HueSplit split_rod_by_hue(std::span<const Hsv> colors);

struct IcpOptions {
  double gate = 0.02;
  double tolerance = 1e-5;
  int max_iterations = 50;
};

struct IcpResult {
  Eigen::Isometry3d transform = Eigen::Isometry3d::Identity();  // source -> target
  double rms = 0.0;
  std::vector<double> history;  // truncated RMS before each update, then final
};

/// Point-to-point ICP. RMS is taken over all source points with distances
/// clamped at the gate, which makes it non-increasing.
IcpResult icp(const std::vector<Eigen::Vector3d>& source, const std::vector<Eigen::Vector3d>& target,
              const Eigen::Isometry3d& initial = Eigen::Isometry3d::Identity(), const IcpOptions& options = {});

/// Camera-facing half-cylinder surface, axis along local z, apex along
/// local x, centred on the origin.
std::vector<Eigen::Vector3d> half_cylinder_template(double radius, double length, int arc_samples = 40,
                                                    double axial_step = 0.002);

struct CylinderFitOptions {
  IcpOptions icp;
  double bracket = 0.3;
  double radius_tolerance = 1e-4;
  double voxel = 0.0025;
};

/// Refines center, axis and radius of `initial` against P' seen from
/// `camera`. Throws IcpDiverged when the best RMS exceeds 10 mm.
RodEstimate fit_half_cylinder(const std::vector<Eigen::Vector3d>& points, const RodEstimate& initial,
                              const Eigen::Vector3d& camera, const CylinderFitOptions& options = {});

struct RodPipelineOptions {
  double robot_plane_x = 0.60;
  double table_z = 0.01;
  double voxel = 0.005;
  double eps = 0.02;
  int min_pts = 8;
  double box_padding = 0.005;
  int row_gap_fill = 40;  // px, bridges rope crossings in the rod mask
  CylinderFitOptions fit;
};

/// Full rod pipeline on a world-frame map.
RodEstimate estimate_rod(const ColorizedDepthMap& world_map, const CameraModel& camera,
                         const RodPipelineOptions& options = {});

}  // namespace wrapbench

#endif  // WRAPBENCH_ROD_ESTIMATION_HPP
