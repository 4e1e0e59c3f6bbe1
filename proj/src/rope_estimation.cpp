#include "wrapbench/rope_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wrapbench/error.hpp"

namespace wrapbench {

namespace {
constexpr double kMinSaturation = 0.25;

// Largest 8-connected component; ties go to the one found first in raster order.
BinaryMask largest_component(const BinaryMask& mask) {
  Raster<int> label(mask.width(), mask.height(), -1);
  std::vector<std::size_t> sizes;
  std::vector<Pixel> stack;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y) || label(x, y) >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      stack.assign(1, Pixel(x, y));
      label(x, y) = id;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        ++sizes[id];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if (mask.at(p.x() + dx, p.y() + dy) && label(p.x() + dx, p.y() + dy) < 0) {
              label(p.x() + dx, p.y() + dy) = id;
              stack.emplace_back(p.x() + dx, p.y() + dy);
            }
      }
    }
  BinaryMask out(mask.width(), mask.height());
  if (sizes.empty()) return out;
  const int keep = static_cast<int>(std::distance(sizes.begin(), std::max_element(sizes.begin(), sizes.end())));
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (label(x, y) == keep) out.set(x, y);
  return out;
}

}  // namespace

std::string to_record(const RopeEstimate& rope) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << "mu=" << rope.hue_mu << " sigma=" << rope.hue_sigma << " d_px=" << rope.diameter_px;
  return os.str();
}

HueGaussian fit_hue_gaussian(const RotatedHueHistogram& hist, std::size_t first, std::size_t last) {
  HueGaussian g;
  double total = 0.0;
  for (std::size_t k = first; k <= last; ++k) total += static_cast<double>(hist.counts[k]);
  if (total <= 0.0) return g;
  double mean = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double p = static_cast<double>(hist.counts[k]) / total;
    g.mass += p;
    mean += p * hist.bin_center(k);
  }
  double var = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double p = static_cast<double>(hist.counts[k]) / total;
    var += p * (hist.bin_center(k) - mean) * (hist.bin_center(k) - mean);
  }
  const double w = hist.bin_width();
  g.mu = hist.unrotate(mean);
  g.sigma = std::sqrt(var + w * w / 12.0);
  return g;
}

RopeEstimate estimate_rope(std::span<const MapSample> region, int width, int height, double pixels_per_mm,
                           int bins) {
  std::vector<Hsv> colors;
  std::vector<Pixel> where;
  for (const auto& s : region)
    if (s.color.s >= kMinSaturation) {
      colors.push_back(s.color);
      where.push_back(s.pixel);
    }
  if (colors.empty()) throw Error(ErrorCode::UnimodalDegenerate, "rod region has no saturated pixel");

  const auto hist = rotated_hue_histogram(colors, bins);
  const std::size_t t = otsu_threshold(hist.counts);
  std::uint64_t low = 0, high = 0;
  for (std::size_t k = 0; k < hist.counts.size(); ++k) (k <= t ? low : high) += hist.counts[k];
  // Rope is the lighter side; on equal mass, the side without the centred mode.
  const std::size_t middle = hist.counts.size() / 2;
  const bool rope_low = low < high || (low == high && t < middle);
  const std::size_t first = rope_low ? 0 : t + 1;
  const std::size_t last = rope_low ? t : hist.counts.size() - 1;

  RopeEstimate out;
  const auto g = fit_hue_gaussian(hist, first, last);
  out.hue_mu = g.mu;
  out.hue_sigma = g.sigma;

  BinaryMask mask(width, height);
  for (std::size_t i = 0; i < colors.size(); ++i) {
    const auto k = static_cast<std::size_t>(hist.bin_of(colors[i].h));
    if (k >= first && k <= last) mask.set(where[i].x(), where[i].y());
  }
  out.rect = min_area_rect(largest_component(mask));
  out.diameter_px = out.rect.width();
  out.diameter_mm = out.diameter_px / pixels_per_mm;
  return out;
}

bool hue_in_range(double hue, const RopeEstimate& rope) {
  return hue_distance(hue, rope.hue_mu) <= 3.0 * rope.hue_sigma;
}

BinaryMask rope_mask(const HsvImage& image, const RopeEstimate& rope) {
  return hue_mask(image, [&](double h) { return hue_in_range(h, rope); }, kMinSaturation);
}

}  // namespace wrapbench
