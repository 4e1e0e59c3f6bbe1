#include "wrapbench/rope_tracing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrapbench/error.hpp"

namespace wrapbench {

BinaryMask HueMaskProvider::segment(const HsvImage& sub_image) const { return rope_mask(sub_image, rope_); }

BinaryMask DefectiveMaskProvider::segment(const HsvImage& sub_image) const {
  BinaryMask m = base_->segment(sub_image);
  for (int y = std::max(0, first_row_); y < std::min(m.height(), first_row_ + rows_); ++y)
    for (int x = 0; x < m.width(); ++x) m.set(x, y, false);
  return m;
}

BinaryMask fuse_masks(const BinaryMask& m1, const BinaryMask& m2) {
  if (m1.width() != m2.width() || m1.height() != m2.height())
    throw Error(ErrorCode::DimensionMismatch, "M1 and M2 differ in size");
  BinaryMask out = m1;
  for (int x = 0; x < m2.width(); ++x) {
    int y = 0;
    while (y < m2.height()) {
      if (!m2.get(x, y)) {
        ++y;
        continue;
      }
      const int begin = y;
      bool touched = false;
      while (y < m2.height() && m2.get(x, y)) touched |= m1.get(x, y++);
      if (touched)
        for (int k = begin; k < y; ++k) out.set(x, k);
    }
  }
  return out;
}

namespace {

std::vector<Pixel> trace_upward(const BinaryMask& skel, Raster<std::uint8_t>& used, Pixel start) {
  std::vector<Pixel> chain{start};
  used(start.x(), start.y()) = 1;
  int last_dx = 0;
  while (true) {
    const Pixel p = chain.back();
    // N first, then the diagonal that continues the last sideways step,
    // then sideways moves.
    std::array<Pixel, 5> order;
    const int lean = last_dx >= 0 ? 1 : -1;
    order[0] = Pixel(0, -1);
    order[1] = Pixel(lean, -1);
    order[2] = Pixel(-lean, -1);
    order[3] = Pixel(lean, 0);
    order[4] = Pixel(-lean, 0);
    bool moved = false;
    for (const auto& step : order) {
      const Pixel q = p + step;
      if (skel.at(q.x(), q.y()) && !used(q.x(), q.y())) {
        used(q.x(), q.y()) = 1;
        chain.push_back(q);
        last_dx = step.x() != 0 ? step.x() : last_dx;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return chain;
}

double chain_length(const std::vector<Pixel>& chain) {
  double len = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i)
    len += (chain[i] - chain[i - 1]).cwiseAbs().sum() == 2 ? std::numbers::sqrt2 : 1.0;
  return len;
}

}  // namespace

RopeSections extract_sections(const BinaryMask& fused, int top_row) {
  BinaryMask cropped = fused;
  for (int y = 0; y < std::min(top_row, fused.height()); ++y)
    for (int x = 0; x < fused.width(); ++x) cropped.set(x, y, false);
  const BinaryMask skel = skeletonize(cropped);

  // A chain starts at a skeleton pixel near the bottom edge with nothing
  // below it.
  const int band = std::max(3, fused.height() / 20);
  Raster<std::uint8_t> used(fused.width(), fused.height(), 0);
  std::vector<std::vector<Pixel>> chains;
  for (int y = fused.height() - 1; y >= std::max(top_row, fused.height() - band); --y)
    for (int x = 0; x < fused.width(); ++x) {
      if (!skel.get(x, y) || used(x, y)) continue;
      if (skel.at(x - 1, y + 1) || skel.at(x, y + 1) || skel.at(x + 1, y + 1)) continue;
      auto chain = trace_upward(skel, used, Pixel(x, y));
      // Thinning eats about half a strand width off the top end; follow the
      // mask straight up to where the strand meets the rod.
      for (Pixel p = chain.back() + Pixel(0, -1); cropped.at(p.x(), p.y()) && !used(p.x(), p.y()); --p.y()) {
        used(p.x(), p.y()) = 1;
        chain.push_back(p);
      }
      chains.push_back(std::move(chain));
    }
  if (chains.size() < 2) throw Error(ErrorCode::SectionsNotFound, "fewer than two rope chains reach the bottom");

  std::stable_sort(chains.begin(), chains.end(),
                   [](const auto& a, const auto& b) { return chain_length(a) > chain_length(b); });
  auto mean_x = [](const std::vector<Pixel>& c) {
    double s = 0.0;
    for (const auto& p : c) s += p.x();
    return s / static_cast<double>(c.size());
  };
  RopeSections out;
  const bool first_is_fixed = mean_x(chains[0]) <= mean_x(chains[1]);
  out.fixed_line = std::move(chains[first_is_fixed ? 0 : 1]);
  out.active_line = std::move(chains[first_is_fixed ? 1 : 0]);
  return out;
}

Eigen::Vector3d lift_to_rod_plane(const Eigen::Vector2d& pixel, const RodEstimate& rod, const CameraModel& camera) {
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d normal = rod.axis.cross(up);
  if (normal.norm() < 1e-9) throw Error(ErrorCode::DegenerateGeometry, "rod axis is vertical");
  normal.normalize();
  const Eigen::Vector3d origin = camera.position();
  const Eigen::Vector3d dir = camera.ray(pixel.x(), pixel.y());
  const double denom = dir.dot(normal);
  if (std::fabs(denom) < 1e-9) throw Error(ErrorCode::DegenerateGeometry, "ray parallel to the rod plane");
  const double t = (rod.center - origin).dot(normal) / denom;
  return origin + t * dir;
}

GraspPose grasp_point(const RopeSections& sections, const GraspSpec& spec, const RodEstimate& rod,
                      const CameraModel& camera, double pixels_per_mm) {
  if (!(spec.l_gp > 0.0)) throw Error(ErrorCode::InvalidConfig, "l_gp must be positive");
  const auto& chain = sections.line(spec.section);
  if (chain.empty()) throw Error(ErrorCode::SectionsNotFound, "requested section is empty");
  const double target = spec.l_gp * 1000.0 * pixels_per_mm;
  double walked = 0.0;
  std::size_t i = chain.size() - 1;
  while (walked < target) {
    if (i == 0) throw Error(ErrorCode::RopeTooShort, "section shorter than l_gp");
    walked += (chain[i] - chain[i - 1]).cwiseAbs().sum() == 2 ? std::numbers::sqrt2 : 1.0;
    --i;
  }
  GraspPose pose;
  pose.pixel = chain[i];
  pose.position = lift_to_rod_plane(chain[i].cast<double>(), rod, camera);
  Eigen::Vector3d approach = Eigen::Vector3d::UnitZ().cross(rod.axis).normalized();
  // From the robot toward the camera side, where the rope hangs.
  if (approach.dot(camera.position() - rod.center) < 0) approach = -approach;
  pose.approach = approach;
  return pose;
}

AxisRect rope_search_box(const AxisRect& rod_box, int table_row, int width, int height) {
  const int widen = static_cast<int>(std::lround(0.2 * rod_box.width()));
  AxisRect box;
  box.min = Pixel(std::max(0, rod_box.min.x() - widen), std::max(0, rod_box.min.y()));
  box.max = Pixel(std::min(width - 1, rod_box.max.x() + widen),
                  std::clamp(std::max(table_row, rod_box.max.y()), 0, height - 1));
  return box;
}

namespace {

HsvImage crop(const HsvImage& image, const AxisRect& box) {
  HsvImage out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y)
    for (int x = 0; x < box.width(); ++x) out(x, y) = image(box.min.x() + x, box.min.y() + y);
  return out;
}

}  // namespace

TraceResult trace_rope(const HsvImage& image, const RodEstimate& rod, const RopeEstimate& rope,
                       const CameraModel& camera, const MaskProvider& m1_provider, double table_z) {
  Eigen::Vector3d below = rod.center;
  below.z() = table_z;
  const auto table_px = camera.project(below);
  const int table_row = table_px ? static_cast<int>(std::floor(table_px->y())) : image.height() - 1;

  TraceResult out;
  out.box = rope_search_box(rod.silhouette, table_row, image.width(), image.height());
  const HsvImage sub = crop(image, out.box);
  out.m1 = m1_provider.segment(sub);
  out.m2 = HueMaskProvider(rope).segment(sub);
  out.fused = fuse_masks(out.m1, out.m2);

  const int top = rod.silhouette.max.y() + 1 - out.box.min.y();
  out.sections = extract_sections(out.fused, top);
  for (auto* line : {&out.sections.fixed_line, &out.sections.active_line})
    for (auto& p : *line) p += out.box.min;
  out.sections.tangent_fixed = lift_to_rod_plane(out.sections.fixed_line.back().cast<double>(), rod, camera);
  out.sections.tangent_active = lift_to_rod_plane(out.sections.active_line.back().cast<double>(), rod, camera);
  return out;
}

void annotate(Rgb8Image& image, const RopeSections& sections, const std::optional<Pixel>& grasp) {
  auto paint = [&](const Pixel& p, Rgb8 c) {
    if (image.inside(p.x(), p.y())) image(p.x(), p.y()) = c;
  };
  for (const auto& p : sections.fixed_line) paint(p, {0, 255, 0});
  for (const auto& p : sections.active_line) paint(p, {0, 0, 255});
  if (grasp)
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) paint(*grasp + Pixel(dx, dy), {255, 0, 0});
}

}  // namespace wrapbench
