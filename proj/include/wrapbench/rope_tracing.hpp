#ifndef WRAPBENCH_ROPE_TRACING_HPP
#define WRAPBENCH_ROPE_TRACING_HPP

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wrapbench/image_io.hpp"
#include "wrapbench/imaging.hpp"
#include "wrapbench/rod_estimation.hpp"
#include "wrapbench/rope_estimation.hpp"

namespace wrapbench {

/// Source of the segmentation mask M1 for a colour sub-image.
class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  virtual BinaryMask segment(const HsvImage& sub_image) const = 0;
};

/// Hue-range threshold; also the source of M2.
class HueMaskProvider : public MaskProvider {
 public:
  explicit HueMaskProvider(RopeEstimate rope) : rope_(rope) {}
  BinaryMask segment(const HsvImage& sub_image) const override;

 private:
  RopeEstimate rope_;
};

/// Wraps another provider and blanks rows [first_row, first_row + rows) of
/// its output, imitating a segmenter that loses the rope near the rod.
class DefectiveMaskProvider : public MaskProvider {
 public:
  DefectiveMaskProvider(std::shared_ptr<const MaskProvider> base, int first_row, int rows)
      : base_(std::move(base)), first_row_(first_row), rows_(rows) {}
  BinaryMask segment(const HsvImage& sub_image) const override;

 private:
  std::shared_ptr<const MaskProvider> base_;
  int first_row_;
  int rows_;
};

/// Adds to M1 every vertical M2 run that passes through an M1 pixel.
BinaryMask fuse_masks(const BinaryMask& m1, const BinaryMask& m2);

enum class Section { Fixed, Active };

struct RopeSections {
  std::vector<Pixel> fixed_line;   // bottom first, rod tangent end last
  std::vector<Pixel> active_line;
  Eigen::Vector3d tangent_fixed = Eigen::Vector3d::Zero();   // A
  Eigen::Vector3d tangent_active = Eigen::Vector3d::Zero();  // B

  const std::vector<Pixel>& line(Section s) const { return s == Section::Fixed ? fixed_line : active_line; }
};

/// Chains traced upward from the bottom rows of the skeleton of `fused`,
/// ignoring rows above `top_row`. The two longest are kept; the one with the
/// smaller mean column is the fixed section. Coordinates are those of
/// `fused`. Throws SectionsNotFound.
RopeSections extract_sections(const BinaryMask& fused, int top_row = 0);

struct GraspSpec {
  Section section = Section::Active;
  double l_gp = 0.0;  // m, from the grasp point up to the rod's lower edge
};

struct GraspPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  /// Horizontal, perpendicular to the rod, pointing from the robot side
  /// toward the rope.
  Eigen::Vector3d approach = Eigen::Vector3d::UnitX();
  Pixel pixel = Pixel::Zero();
};

/// Intersection of the pixel's viewing ray with the vertical plane that
/// contains the rod axis.
Eigen::Vector3d lift_to_rod_plane(const Eigen::Vector2d& pixel, const RodEstimate& rod, const CameraModel& camera);

/// Walks l_gp * scale pixels down the chosen chain from its rod end and lifts
/// the pixel to 3D. `pixels_per_mm` converts l_gp. Throws RopeTooShort.
GraspPose grasp_point(const RopeSections& sections, const GraspSpec& spec, const RodEstimate& rod,
                      const CameraModel& camera, double pixels_per_mm);

/// Rod box widened 20% at both sides and extended down to `table_row`.
AxisRect rope_search_box(const AxisRect& rod_box, int table_row, int width, int height);

struct TraceResult {
  AxisRect box;
  BinaryMask m1, m2, fused;  // sub-image coordinates
  RopeSections sections;     // full-image coordinates
};

TraceResult trace_rope(const HsvImage& image, const RodEstimate& rod, const RopeEstimate& rope,
                       const CameraModel& camera, const MaskProvider& m1_provider, double table_z = 0.0);

/// Fixed section green, active blue, grasp pixel red.
void annotate(Rgb8Image& image, const RopeSections& sections, const std::optional<Pixel>& grasp);

}  // namespace wrapbench

#endif  // WRAPBENCH_ROPE_TRACING_HPP
