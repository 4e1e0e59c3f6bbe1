#ifndef WRAPBENCH_IMAGING_HPP
#define WRAPBENCH_IMAGING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wrapbench {

using Pixel = Eigen::Vector2i;

/// Hue in degrees [0, 360), saturation and value in [0, 1].
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

Rgb8 to_rgb(const Hsv& c);
Hsv to_hsv(const Rgb8& c);

/// Wraps any hue into [0, 360).
double normalize_hue(double h);
/// Shortest angular distance between two hues, in [0, 180].
double hue_distance(double a, double b);

/// Row-major dense raster. Coordinates are (x = column, y = row).
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using HsvImage = Raster<Hsv>;
/// Depth raster in millimetres, 0 marks an invalid sample.
using DepthImage = Raster<std::uint16_t>;

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height) : bits_(width, height, 0) {}

  int width() const { return bits_.width(); }
  int height() const { return bits_.height(); }
  bool inside(int x, int y) const { return bits_.inside(x, y); }

  bool get(int x, int y) const { return bits_(x, y) != 0; }
  /// Out-of-bounds reads are background.
  bool at(int x, int y) const { return inside(x, y) && get(x, y); }
  void set(int x, int y, bool on = true) { bits_(x, y) = on ? 1 : 0; }

  std::size_t count() const;
  bool none() const { return count() == 0; }
  std::vector<Pixel> foreground() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  Raster<std::uint8_t> bits_;
};

/// Rotated rectangle. `half_extents.x()` spans the short ("width") edge along
/// (cos angle, sin angle); `half_extents.y()` spans the long edge.
struct OrientedRect {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d half_extents = Eigen::Vector2d::Zero();
  double angle = 0.0;  // radians, in (-pi/2, pi/2]

  double width() const { return 2.0 * half_extents.x(); }
  double length() const { return 2.0 * half_extents.y(); }
  double area() const { return width() * length(); }
};

/// Inclusive pixel rectangle.
struct AxisRect {
  Pixel min = Pixel::Zero();
  Pixel max = Pixel::Zero();

  int width() const { return max.x() - min.x() + 1; }
  int height() const { return max.y() - min.y() + 1; }
  long area() const { return static_cast<long>(width()) * height(); }
  bool contains(int x, int y) const {
    return x >= min.x() && x <= max.x() && y >= min.y() && y <= max.y();
  }
  bool operator==(const AxisRect&) const = default;
};

struct Intrinsics {
  double fx = 800.0;
  double fy = 800.0;
  double cx = 320.0;
  double cy = 240.0;
};

/// Pinhole camera. Camera frame: x right, y down, z forward.
struct CameraModel {
  Intrinsics intrinsics;
  int width = 640;
  int height = 480;
  Eigen::Isometry3d world_from_camera = Eigen::Isometry3d::Identity();

  Eigen::Vector3d position() const { return world_from_camera.translation(); }
  /// Projection of a world point to continuous pixel coordinates.
  std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& world) const;
  /// Unit ray direction (world frame) through the centre of pixel (x, y).
  Eigen::Vector3d ray(double x, double y) const;
  /// Pixels per metre for a surface at the given depth along the optical axis.
  double scale_at_depth(double depth) const { return intrinsics.fx / depth; }
  /// Depth of a world point along the optical axis.
  double depth_of(const Eigen::Vector3d& world) const;
};

/// One registered sample of an RGB-D frame: 3D point plus its pixel and color.
struct MapSample {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Pixel pixel = Pixel::Zero();
  Hsv color;
};

/// Joint container of the 3D points and the registered colored pixels of a
/// frame. Every sample owns exactly one pixel and vice versa.
struct ColorizedDepthMap {
  int width = 0;
  int height = 0;
  Intrinsics intrinsics;
  std::vector<MapSample> samples;

  /// Throws DimensionMismatch when a pixel is outside the frame or used twice.
  void validate() const;
  /// Per-pixel sample index, -1 where the frame has no valid point.
  Raster<int> pixel_index() const;
  std::vector<Eigen::Vector3d> points() const;
};

ColorizedDepthMap transform_points(const ColorizedDepthMap& map, const Eigen::Isometry3d& transform);

// --- Operations -----------------------------------------------------------

/// Histogram of hues over `bins` equal-width bins covering [0, 360).
std::vector<std::uint64_t> hue_histogram(std::span<const Hsv> pixels, int bins);

/// Hue histogram with its origin rotated so the fullest bin lands in the
/// middle bin. Hue `h` maps to `normalize_hue(h - offset)`.
struct RotatedHueHistogram {
  std::vector<std::uint64_t> counts;
  double offset = 0.0;

  double bin_width() const { return 360.0 / static_cast<double>(counts.size()); }
  double bin_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * bin_width(); }
  double rotate(double hue) const { return normalize_hue(hue - offset); }
  double unrotate(double hue) const { return normalize_hue(hue + offset); }
  int bin_of(double hue) const;
};

RotatedHueHistogram rotated_hue_histogram(std::span<const Hsv> pixels, int bins);

/// Otsu threshold t over classes [0..t] and [t+1..n-1]; ties go to the
/// smallest t. Throws UnimodalDegenerate when all mass sits in one bin.
std::size_t otsu_threshold(std::span<const std::uint64_t> histogram);

/// Zhang-Suen thinning followed by removal of 2x2 blocks through simple
/// points. Every deletion is a simple point, so components never split or
/// vanish.
BinaryMask skeletonize(const BinaryMask& mask);

/// Largest all-foreground axis-aligned rectangle; ties go to the smallest
/// (min_y, min_x). Throws EmptyMask.
AxisRect max_inscribed_rect(const BinaryMask& mask);

/// Minimum-area enclosing rectangle of the foreground pixel centres, each
/// extent padded by one pixel so an n-pixel run measures n. Throws
/// DegenerateGeometry for fewer than 3 or collinear pixel centres.
OrientedRect min_area_rect(const BinaryMask& mask);

/// Convex hull (counter-clockwise, no collinear points) by monotone chain.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points);

/// Closes horizontal background runs no wider than `max_gap` that have
/// foreground on both sides.
BinaryMask fill_row_gaps(const BinaryMask& mask, int max_gap);

/// Number of 8-connected foreground components.
int count_components(const BinaryMask& mask);

/// Foreground where the pixel's hue is accepted by `accept` and its
/// saturation and value clear the floors.
template <typename HuePredicate>
BinaryMask hue_mask(const HsvImage& image, HuePredicate&& accept, double min_saturation = 0.25,
                    double min_value = 0.1) {
  BinaryMask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const Hsv& c = image(x, y);
      if (c.s >= min_saturation && c.v >= min_value && accept(c.h)) mask.set(x, y);
    }
  return mask;
}

}  // namespace wrapbench

#endif  // WRAPBENCH_IMAGING_HPP
