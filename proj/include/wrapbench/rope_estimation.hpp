#ifndef WRAPBENCH_ROPE_ESTIMATION_HPP
#define WRAPBENCH_ROPE_ESTIMATION_HPP

#include <span>
#include <string>

#include "wrapbench/imaging.hpp"

namespace wrapbench {

struct RopeEstimate {
  double hue_mu = 0.0;     // degrees
  double hue_sigma = 0.0;  // degrees
  double diameter_px = 0.0;
  double diameter_mm = 0.0;
  OrientedRect rect;  // rope blob the diameter came from

  double hue_lo() const { return normalize_hue(hue_mu - 3.0 * hue_sigma); }
  double hue_hi() const { return normalize_hue(hue_mu + 3.0 * hue_sigma); }
};

/// "mu= sigma= d_px=" record.
std::string to_record(const RopeEstimate& rope);

struct HueGaussian {
  double mu = 0.0;
  double sigma = 0.0;
  double mass = 0.0;  // normalized mass over the fitted bins, 1 when nonempty
};

/// Moment fit over bins [first, last] of a rotated histogram, with the
/// within-bin variance w^2/12 added. mu is reported unrotated.
HueGaussian fit_hue_gaussian(const RotatedHueHistogram& hist, std::size_t first, std::size_t last);

/// Rope hue and pixel diameter from the rod region Q'. `width`/`height`
/// are the frame size; `pixels_per_mm` the scale at the rod's depth.
RopeEstimate estimate_rope(std::span<const MapSample> region, int width, int height, double pixels_per_mm,
                           int bins = 36);

/// Circular test hue in [mu - 3 sigma, mu + 3 sigma].
bool hue_in_range(double hue, const RopeEstimate& rope);

BinaryMask rope_mask(const HsvImage& image, const RopeEstimate& rope);

}  // namespace wrapbench

#endif  // WRAPBENCH_ROPE_ESTIMATION_HPP
