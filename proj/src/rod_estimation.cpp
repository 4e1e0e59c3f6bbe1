#include "wrapbench/rod_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "wrapbench/error.hpp"
#include "wrapbench/kdtree.hpp"

namespace wrapbench {

std::vector<Pixel> RodEstimate::pixels() const {
  std::vector<Pixel> out;
  out.reserve(region.size());
  for (const auto& s : region) out.push_back(s.pixel);
  return out;
}

std::vector<Eigen::Vector3d> RodEstimate::points() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(region.size());
  for (const auto& s : region) out.push_back(s.point);
  return out;
}

std::string to_record(const RodEstimate& rod) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << "center=" << rod.center.x() << ',' << rod.center.y() << ',' << rod.center.z()
     << " axis=" << rod.axis.x() << ',' << rod.axis.y() << ',' << rod.axis.z() << " radius=" << rod.radius
     << " length=" << rod.length;
  return os.str();
}

ColorizedDepthMap subtract_background(const ColorizedDepthMap& map, double robot_plane_x, double table_z) {
  ColorizedDepthMap out = map;
  out.samples.clear();
  for (const auto& s : map.samples)
    if (s.point.x() < robot_plane_x && s.point.z() > table_z) out.samples.push_back(s);
  if (out.samples.empty()) throw Error(ErrorCode::EmptyScene, "no point between the robot and the camera");
  return out;
}

std::vector<Eigen::Vector3d> voxel_downsample(const std::vector<Eigen::Vector3d>& points, double edge) {
  if (!(edge > 0.0)) throw Error(ErrorCode::InvalidConfig, "voxel edge must be positive");
  struct KeyHash {
    std::size_t operator()(const Eigen::Vector3i& k) const {
      return (static_cast<std::size_t>(k.x()) * 73856093u) ^ (static_cast<std::size_t>(k.y()) * 19349663u) ^
             (static_cast<std::size_t>(k.z()) * 83492791u);
    }
  };
  struct KeyEq {
    bool operator()(const Eigen::Vector3i& a, const Eigen::Vector3i& b) const { return a == b; }
  };
  std::unordered_map<Eigen::Vector3i, std::size_t, KeyHash, KeyEq> slot;
  std::vector<Eigen::Vector3d> sums;
  std::vector<int> counts;
  for (const auto& p : points) {
    const Eigen::Vector3i key = (p / edge).array().floor().cast<int>();
    auto [it, inserted] = slot.try_emplace(key, sums.size());
    if (inserted) {
      sums.push_back(Eigen::Vector3d::Zero());
      counts.push_back(0);
    }
    sums[it->second] += p;
    ++counts[it->second];
  }
  for (std::size_t i = 0; i < sums.size(); ++i) sums[i] /= counts[i];
  return sums;
}

ClusterLabeling dbscan(const std::vector<Eigen::Vector3d>& points, double eps, int min_pts) {
  if (!(eps > 0.0) || min_pts < 1) throw Error(ErrorCode::InvalidConfig, "dbscan needs eps > 0, min_pts >= 1");
  constexpr int kUnvisited = -2;
  ClusterLabeling out;
  out.eps = eps;
  out.min_pts = min_pts;
  out.labels.assign(points.size(), kUnvisited);
  const KdTree tree(points);

  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (out.labels[i] != kUnvisited) continue;
    const auto seeds = tree.within(points[i], eps);
    if (static_cast<int>(seeds.size()) < min_pts) {
      out.labels[i] = kNoise;
      continue;
    }
    const int c = out.clusters++;
    out.labels[i] = c;
    queue.assign(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (out.labels[q] == kNoise) out.labels[q] = c;  // border point
      if (out.labels[q] != kUnvisited) continue;
      out.labels[q] = c;
      const auto nb = tree.within(points[q], eps);
      if (static_cast<int>(nb.size()) >= min_pts) queue.insert(queue.end(), nb.begin(), nb.end());
    }
  }
  return out;
}

int nearest_cluster(const ClusterLabeling& labeling, const std::vector<Eigen::Vector3d>& points,
                    const Eigen::Vector3d& camera) {
  if (labeling.clusters == 0) throw Error(ErrorCode::NoClusters, "every point is noise");
  std::vector<Eigen::Vector3d> sums(labeling.clusters, Eigen::Vector3d::Zero());
  std::vector<int> counts(labeling.clusters, 0);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (labeling.labels[i] >= 0) {
      sums[labeling.labels[i]] += points[i];
      ++counts[labeling.labels[i]];
    }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < labeling.clusters; ++c) {
    if (counts[c] == 0) continue;
    const double d = (sums[c] / counts[c] - camera).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best < 0) throw Error(ErrorCode::NoClusters, "no populated cluster");
  return best;
}

namespace {

struct CircularStats {
  double mean = 0.0;
  double spread = 0.0;
};

CircularStats circular_stats(std::span<const Hsv> colors, const std::vector<std::size_t>& idx) {
  double c = 0.0, s = 0.0;
  for (const auto i : idx) {
    const double a = colors[i].h * std::numbers::pi / 180.0;
    c += std::cos(a);
    s += std::sin(a);
  }
  CircularStats out;
  if (idx.empty()) return out;
  out.mean = normalize_hue(std::atan2(s, c) * 180.0 / std::numbers::pi);
  const double rbar = std::min(1.0, std::hypot(c, s) / static_cast<double>(idx.size()));
  out.spread = rbar > 0.0 ? std::sqrt(-2.0 * std::log(rbar)) * 180.0 / std::numbers::pi : 180.0;
  return out;
}

}  // namespace

HueSplit split_rod_by_hue(std::span<const Hsv> colors) {
  HueSplit out;
  if (colors.empty()) return out;
  const auto hist = hue_histogram(colors, 36);
  const auto dominant = std::distance(hist.begin(), std::max_element(hist.begin(), hist.end()));
  std::array<double, 2> centre{(static_cast<double>(dominant) + 0.5) * 10.0, 0.0};
  double far = -1.0;
  for (const auto& c : colors)
    if (const double d = hue_distance(c.h, centre[0]); d > far) {
      far = d;
      centre[1] = c.h;
    }

  std::vector<std::uint8_t> assign(colors.size(), 0);
  std::array<std::vector<std::size_t>, 2> members;
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      const std::uint8_t k = hue_distance(colors[i].h, centre[1]) < hue_distance(colors[i].h, centre[0]) ? 1 : 0;
      if (k != assign[i]) changed = true;
      assign[i] = k;
    }
    members[0].clear();
    members[1].clear();
    for (std::size_t i = 0; i < colors.size(); ++i) members[assign[i]].push_back(i);
    if (!changed) break;
    for (int k = 0; k < 2; ++k)
      if (!members[k].empty()) centre[k] = circular_stats(colors, members[k]).mean;
  }
  std::array<CircularStats, 2> stats{circular_stats(colors, members[0]), circular_stats(colors, members[1])};
  int keep = members[0].size() > members[1].size() ? 0 : 1;
  if (members[0].size() == members[1].size()) keep = stats[0].mean <= stats[1].mean ? 0 : 1;
  out.members = std::move(members[keep]);
  out.mean_hue = stats[keep].mean;
  out.spread = stats[keep].spread;
  return out;
}

IcpResult icp(const std::vector<Eigen::Vector3d>& source, const std::vector<Eigen::Vector3d>& target,
              const Eigen::Isometry3d& initial, const IcpOptions& options) {
  if (source.empty() || target.empty()) throw Error(ErrorCode::IcpDiverged, "empty point set");
  const KdTree tree(target);
  const double gate2 = options.gate * options.gate;
  IcpResult out;
  out.transform = initial;

  std::vector<Eigen::Vector3d> moved(source.size());
  std::vector<std::size_t> match(source.size());
  std::vector<double> d2(source.size());
  const auto correspond = [&](const Eigen::Isometry3d& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
      moved[i] = x * source[i];
      const auto hit = tree.nearest(moved[i]);
      match[i] = hit.index;
      d2[i] = hit.squared_distance;
      sum += std::min(d2[i], gate2);
    }
    return std::sqrt(sum / static_cast<double>(source.size()));
  };
  for (int iter = 0;; ++iter) {
    const double rms = correspond(out.transform);
    const bool settled = !out.history.empty() && out.history.back() - rms < options.tolerance;
    out.history.push_back(rms);
    if (settled || iter >= options.max_iterations) break;

    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < source.size(); ++i)
      if (d2[i] < gate2) inliers.push_back(i);
    if (inliers.size() < 3) break;
    Eigen::Matrix3Xd src(3, inliers.size()), dst(3, inliers.size());
    for (std::size_t k = 0; k < inliers.size(); ++k) {
      src.col(k) = moved[inliers[k]];
      dst.col(k) = target[match[inliers[k]]];
    }
    const Eigen::Matrix4d step = Eigen::umeyama(src, dst, false);
    // Slides along the surface come in small steps that look settled; keep
    // doubling the step, taken about the matched centroid, while the RMS
    // still drops.
    const Eigen::Vector3d c = src.rowwise().mean();
    const Eigen::AngleAxisd turn(Eigen::Matrix3d(step.topLeftCorner<3, 3>()));
    const Eigen::Vector3d shift = Eigen::Affine3d(step) * c - c;
    auto scaled = [&](double k) {
      Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
      t.translate(c + k * shift).rotate(Eigen::AngleAxisd(k * turn.angle(), turn.axis())).translate(-c);
      return t * out.transform;
    };
    Eigen::Isometry3d best = scaled(1.0);
    double best_rms = correspond(best);
    for (double k = 2.0; k <= 64.0; k *= 2.0) {
      const Eigen::Isometry3d cand = scaled(k);
      const double r = correspond(cand);
      if (!(r < best_rms)) break;
      best = cand;
      best_rms = r;
    }
    out.transform = best;
  }
  out.rms = out.history.back();
  return out;
}

std::vector<Eigen::Vector3d> half_cylinder_template(double radius, double length, int arc_samples,
                                                    double axial_step) {
  std::vector<Eigen::Vector3d> out;
  const int rows = std::max(2, static_cast<int>(std::floor(length / axial_step)) + 1);
  const double step = length / (rows - 1);
  out.reserve(static_cast<std::size_t>(rows) * arc_samples);
  for (int a = 0; a < arc_samples; ++a) {
    const double phi = -std::numbers::pi / 2 + std::numbers::pi * a / (arc_samples - 1);
    for (int s = 0; s < rows; ++s)
      out.emplace_back(radius * std::cos(phi), radius * std::sin(phi), -0.5 * length + s * step);
  }
  return out;
}

RodEstimate fit_half_cylinder(const std::vector<Eigen::Vector3d>& points, const RodEstimate& initial,
                              const Eigen::Vector3d& camera, const CylinderFitOptions& options) {
  if (points.size() < 50) throw Error(ErrorCode::IcpDiverged, "fewer than 50 rod points");
  const Eigen::Vector3d e3 = initial.axis.normalized();
  Eigen::Vector3d view = camera - initial.center;
  view -= view.dot(e3) * e3;
  const Eigen::Vector3d e1 = view.normalized();

  double s_lo = std::numeric_limits<double>::infinity(), s_hi = -s_lo;
  for (const auto& p : points) {
    const double s = (p - initial.center).dot(e3);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
  }
  const double length = s_hi - s_lo;

  Eigen::Isometry3d frame = Eigen::Isometry3d::Identity();
  frame.linear().col(0) = e1;
  frame.linear().col(1) = e3.cross(e1);
  frame.linear().col(2) = e3;
  frame.translation() = initial.center + 0.5 * (s_lo + s_hi) * e3;

  const auto target = voxel_downsample(points, options.voxel);
  auto evaluate = [&](double r) {
    return icp(half_cylinder_template(r, length), target, frame, options.icp);
  };

  // Golden-section search on the radius.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = initial.radius * (1.0 - options.bracket);
  double b = initial.radius * (1.0 + options.bracket);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = evaluate(c).rms, fd = evaluate(d).rms;
  while (b - a > options.radius_tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = evaluate(c).rms;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = evaluate(d).rms;
    }
  }
  const double radius = 0.5 * (a + b);
  const IcpResult fit = evaluate(radius);
  if (fit.rms > 0.01) throw Error(ErrorCode::IcpDiverged, "half-cylinder RMS " + std::to_string(fit.rms) + " m");

  RodEstimate out = initial;
  out.radius = radius;
  out.center = fit.transform.translation();
  out.axis = fit.transform.linear().col(2).normalized();
  if (out.axis.dot(e3) < 0) out.axis = -out.axis;
  out.length = length;
  out.rms = fit.rms;
  return out;
}

RodEstimate estimate_rod(const ColorizedDepthMap& world_map, const CameraModel& camera,
                         const RodPipelineOptions& options) {
  const auto scene = subtract_background(world_map, options.robot_plane_x, options.table_z);
  const auto all_points = scene.points();
  const auto sparse = voxel_downsample(all_points, options.voxel);
  const auto labels = dbscan(sparse, options.eps, options.min_pts);
  const int rod_cluster = nearest_cluster(labels, sparse, camera.position());

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::size_t i = 0; i < sparse.size(); ++i)
    if (labels.labels[i] == rod_cluster) {
      lo = lo.cwiseMin(sparse[i]);
      hi = hi.cwiseMax(sparse[i]);
    }
  lo.array() -= options.box_padding;
  hi.array() += options.box_padding;

  std::vector<std::size_t> in_box;
  std::vector<Hsv> colors;
  for (std::size_t i = 0; i < scene.samples.size(); ++i) {
    const auto& p = scene.samples[i].point;
    // Hue of unsaturated pixels is noise.
    if (scene.samples[i].color.s >= 0.25 && (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) {
      in_box.push_back(i);
      colors.push_back(scene.samples[i].color);
    }
  }
  if (in_box.size() < 2) throw Error(ErrorCode::EmptyScene, "nearest cluster box holds no pixel");
  const auto split = split_rod_by_hue(colors);

  BinaryMask rod_mask(scene.width, scene.height);
  for (const auto k : split.members) {
    const auto& px = scene.samples[in_box[k]].pixel;
    rod_mask.set(px.x(), px.y());
  }
  rod_mask = fill_row_gaps(rod_mask, options.row_gap_fill);
  const AxisRect rect = max_inscribed_rect(rod_mask);

  const double hue_tol = std::max(15.0, 3.0 * split.spread);
  RodEstimate initial;
  initial.rect = rect;
  initial.rod_hue = split.mean_hue;
  std::vector<Eigen::Vector3d> rod_points;
  for (const auto& s : scene.samples) {
    if (!rect.contains(s.pixel.x(), s.pixel.y())) continue;
    initial.region.push_back(s);
    if (hue_distance(s.color.h, split.mean_hue) <= hue_tol) rod_points.push_back(s.point);
  }
  if (rod_points.size() < 50) throw Error(ErrorCode::IcpDiverged, "inscribed rectangle holds too few rod points");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : rod_points) centroid += p;
  centroid /= static_cast<double>(rod_points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : rod_points) cov += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Vector3d axis = eig.eigenvectors().col(2);
  // Axis points toward increasing image x.
  if (axis.dot(camera.world_from_camera.linear().col(0)) < 0) axis = -axis;

  const double scale = camera.scale_at_depth(camera.depth_of(centroid));
  initial.radius = 0.5 * rect.height() / scale;
  Eigen::Vector3d toward = camera.position() - centroid;
  toward = (toward - toward.dot(axis) * axis).normalized();
  initial.center = centroid - (2.0 * initial.radius / std::numbers::pi) * toward;
  initial.axis = axis;

  RodEstimate rod = fit_half_cylinder(rod_points, initial, camera.position(), options.fit);

  // Silhouette rows: rod hue (gaps bridged) over at least half the rectangle.
  int top = -1, bottom = -1;
  for (int y = 0; y < rod_mask.height(); ++y) {
    int n = 0;
    for (int x = rect.min.x(); x <= rect.max.x(); ++x) n += rod_mask.get(x, y) ? 1 : 0;
    if (2 * n >= rect.width()) {
      if (top < 0) top = y;
      bottom = y;
    }
  }
  rod.silhouette = AxisRect{Pixel(rect.min.x(), top), Pixel(rect.max.x(), bottom)};
  return rod;
}

}  // namespace wrapbench
