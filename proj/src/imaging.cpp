#include "wrapbench/imaging.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <queue>

#include "wrapbench/error.hpp"

namespace wrapbench {

// --- color ----------------------------------------------------------------

double normalize_hue(double h) {
  double r = std::fmod(h, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

double hue_distance(double a, double b) {
  const double d = std::fabs(normalize_hue(a) - normalize_hue(b));
  return std::min(d, 360.0 - d);
}

Rgb8 to_rgb(const Hsv& c) {
  const double h = normalize_hue(c.h) / 60.0;
  const double s = std::clamp(c.s, 0.0, 1.0);
  const double v = std::clamp(c.v, 0.0, 1.0);
  const double chroma = v * s;
  const double x = chroma * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  const double m = v - chroma;
  auto q = [](double u) { return static_cast<std::uint8_t>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0)); };
  return {q(r + m), q(g + m), q(b + m)};
}

Hsv to_hsv(const Rgb8& c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    out.h = 0.0;
  } else if (mx == r) {
    out.h = 60.0 * std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    out.h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    out.h = 60.0 * ((r - g) / delta + 4.0);
  }
  out.h = normalize_hue(out.h);
  return out;
}

// --- containers -----------------------------------------------------------

std::size_t BinaryMask::count() const {
  const auto px = bits_.pixels();
  return static_cast<std::size_t>(std::count(px.begin(), px.end(), std::uint8_t{1}));
}

std::vector<Pixel> BinaryMask::foreground() const {
  std::vector<Pixel> out;
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (get(x, y)) out.emplace_back(x, y);
  return out;
}

std::optional<Eigen::Vector2d> CameraModel::project(const Eigen::Vector3d& world) const {
  const Eigen::Vector3d p = world_from_camera.inverse() * world;
  if (p.z() <= 1e-9) return std::nullopt;
  return Eigen::Vector2d(intrinsics.fx * p.x() / p.z() + intrinsics.cx,
                         intrinsics.fy * p.y() / p.z() + intrinsics.cy);
}

Eigen::Vector3d CameraModel::ray(double x, double y) const {
  const Eigen::Vector3d d((x - intrinsics.cx) / intrinsics.fx, (y - intrinsics.cy) / intrinsics.fy, 1.0);
  return (world_from_camera.linear() * d).normalized();
}

double CameraModel::depth_of(const Eigen::Vector3d& world) const {
  return (world_from_camera.inverse() * world).z();
}

void ColorizedDepthMap::validate() const {
  Raster<std::uint8_t> used(width, height, 0);
  for (const auto& s : samples) {
    if (!used.inside(s.pixel.x(), s.pixel.y()))
      throw Error(ErrorCode::DimensionMismatch, "sample pixel outside the frame");
    if (used(s.pixel.x(), s.pixel.y()))
      throw Error(ErrorCode::DimensionMismatch, "two samples share one pixel");
    used(s.pixel.x(), s.pixel.y()) = 1;
  }
}

Raster<int> ColorizedDepthMap::pixel_index() const {
  Raster<int> index(width, height, -1);
  for (std::size_t i = 0; i < samples.size(); ++i)
    index(samples[i].pixel.x(), samples[i].pixel.y()) = static_cast<int>(i);
  return index;
}

std::vector<Eigen::Vector3d> ColorizedDepthMap::points() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.point);
  return out;
}

ColorizedDepthMap transform_points(const ColorizedDepthMap& map, const Eigen::Isometry3d& transform) {
  ColorizedDepthMap out = map;
  for (auto& s : out.samples) s.point = transform * s.point;
  return out;
}

// --- hue histograms ---------------------------------------------------------

std::vector<std::uint64_t> hue_histogram(std::span<const Hsv> pixels, int bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidConfig, "hue histogram needs at least 2 bins");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  for (const auto& p : pixels) {
    const int k = std::min(bins - 1, static_cast<int>(normalize_hue(p.h) * bins / 360.0));
    ++counts[static_cast<std::size_t>(k)];
  }
  return counts;
}

int RotatedHueHistogram::bin_of(double hue) const {
  const int bins = static_cast<int>(counts.size());
  return std::min(bins - 1, static_cast<int>(rotate(hue) / bin_width()));
}

RotatedHueHistogram rotated_hue_histogram(std::span<const Hsv> pixels, int bins) {
  RotatedHueHistogram out;
  const auto plain = hue_histogram(pixels, bins);
  const auto dominant =
      static_cast<std::size_t>(std::distance(plain.begin(), std::max_element(plain.begin(), plain.end())));
  const double width = 360.0 / bins;

  // Mean hue of the dominant bin's pixels becomes the middle bin's centre.
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : pixels) {
    const double h = normalize_hue(p.h);
    if (std::min(bins - 1, static_cast<int>(h / width)) == static_cast<int>(dominant)) {
      sum += h;
      ++n;
    }
  }
  const double mode = n > 0 ? sum / static_cast<double>(n) : (dominant + 0.5) * width;
  out.offset = normalize_hue(mode - (bins / 2 + 0.5) * width);
  out.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& p : pixels) ++out.counts[static_cast<std::size_t>(out.bin_of(p.h))];
  return out;
}

// --- Otsu -------------------------------------------------------------------

namespace {

using u128 = unsigned __int128;

int bit_length(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 128 - std::countl_zero(hi);
  return 64 - std::countl_zero(static_cast<std::uint64_t>(v));
}

/// Between-class score (N*S0 - W0*S)^2 / (W0*W1), kept as an exact fraction.
struct Score {
  u128 num = 0;
  u128 den = 1;
  long double approx = 0.0L;
};

// a > b, exact when the cross products fit in 128 bits.
bool greater(const Score& a, const Score& b) {
  if (bit_length(a.num) + bit_length(b.den) < 128 && bit_length(b.num) + bit_length(a.den) < 128)
    return a.num * b.den > b.num * a.den;
  return a.approx > b.approx;
}

}  // namespace

std::size_t otsu_threshold(std::span<const std::uint64_t> histogram) {
  if (histogram.size() < 2) throw Error(ErrorCode::UnimodalDegenerate, "histogram needs at least 2 bins");
  std::size_t occupied = 0;
  std::uint64_t total = 0;
  u128 weighted = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    if (histogram[k] > 0) ++occupied;
    total += histogram[k];
    weighted += static_cast<u128>(k) * histogram[k];
  }
  if (occupied < 2) throw Error(ErrorCode::UnimodalDegenerate, "all histogram mass lies in one bin");

  std::size_t best_t = 0;
  Score best;
  bool have_best = false;
  std::uint64_t w0 = 0;
  u128 s0 = 0;
  for (std::size_t t = 0; t + 1 < histogram.size(); ++t) {
    w0 += histogram[t];
    s0 += static_cast<u128>(t) * histogram[t];
    const std::uint64_t w1 = total - w0;
    Score score;
    if (w0 > 0 && w1 > 0) {
      const u128 lhs = static_cast<u128>(total) * s0;
      const u128 rhs = static_cast<u128>(w0) * weighted;
      const u128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
      score.num = diff * diff;
      score.den = static_cast<u128>(w0) * w1;
      const long double d = static_cast<long double>(diff);
      score.approx = d * d / (static_cast<long double>(w0) * static_cast<long double>(w1));
    }
    if (!have_best || greater(score, best)) {
      best = score;
      best_t = t;
      have_best = true;
    }
  }
  return best_t;
}

// --- skeletonization --------------------------------------------------------

namespace {

// Neighbour offsets P2..P9, clockwise from north.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<bool, 8> ring(const BinaryMask& m, int x, int y) {
  std::array<bool, 8> r{};
  for (int i = 0; i < 8; ++i) r[i] = m.at(x + kDx[i], y + kDy[i]);
  return r;
}

int neighbours(const std::array<bool, 8>& r) { return static_cast<int>(std::count(r.begin(), r.end(), true)); }

int transitions(const std::array<bool, 8>& r) {
  int a = 0;
  for (int i = 0; i < 8; ++i)
    if (!r[i] && r[(i + 1) % 8]) ++a;
  return a;
}

// Deleting p keeps both the 8-connected foreground and the 4-connected
// background topology of its neighbourhood.
bool is_simple(const BinaryMask& m, int x, int y) {
  const auto r = ring(m, x, y);
  auto adjacent8 = [](int i, int j) {
    const int dx = std::abs(kDx[i] - kDx[j]);
    const int dy = std::abs(kDy[i] - kDy[j]);
    return std::max(dx, dy) == 1;
  };
  auto adjacent4 = [](int i, int j) { return std::abs(kDx[i] - kDx[j]) + std::abs(kDy[i] - kDy[j]) == 1; };

  std::array<int, 8> label{};
  label.fill(-1);
  int fg_components = 0;
  for (int s = 0; s < 8; ++s) {
    if (!r[s] || label[s] >= 0) continue;
    std::array<int, 8> stack{};
    int top = 0;
    stack[top++] = s;
    label[s] = fg_components;
    while (top > 0) {
      const int i = stack[--top];
      for (int j = 0; j < 8; ++j)
        if (r[j] && label[j] < 0 && adjacent8(i, j)) {
          label[j] = fg_components;
          stack[top++] = j;
        }
    }
    ++fg_components;
  }
  if (fg_components != 1) return false;

  label.fill(-1);
  int bg_components = 0;
  for (int s = 0; s < 8; s += 2) {  // 4-neighbours only seed
    if (r[s] || label[s] >= 0) continue;
    std::array<int, 8> stack{};
    int top = 0;
    stack[top++] = s;
    label[s] = bg_components;
    while (top > 0) {
      const int i = stack[--top];
      for (int j = 0; j < 8; ++j)
        if (!r[j] && label[j] < 0 && adjacent4(i, j)) {
          label[j] = bg_components;
          stack[top++] = j;
        }
    }
    ++bg_components;
  }
  return bg_components == 1;
}

bool zhang_suen_candidate(const BinaryMask& m, int x, int y, int step) {
  const auto r = ring(m, x, y);
  const int b = neighbours(r);
  if (b < 2 || b > 6 || transitions(r) != 1) return false;
  const bool p2 = r[0], p4 = r[2], p6 = r[4], p8 = r[6];
  return step == 0 ? (!(p2 && p4 && p6) && !(p4 && p6 && p8)) : (!(p2 && p4 && p8) && !(p2 && p6 && p8));
}

bool zhang_suen_pass(BinaryMask& m, int step) {
  std::vector<Pixel> candidates;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.get(x, y) && zhang_suen_candidate(m, x, y, step)) candidates.emplace_back(x, y);
  // Re-check at deletion time so no deletion can split or erase a component.
  bool changed = false;
  for (const auto& p : candidates) {
    if (zhang_suen_candidate(m, p.x(), p.y(), step) && is_simple(m, p.x(), p.y())) {
      m.set(p.x(), p.y(), false);
      changed = true;
    }
  }
  return changed;
}

}  // namespace

BinaryMask skeletonize(const BinaryMask& mask) {
  BinaryMask m = mask;
  while (true) {
    const bool a = zhang_suen_pass(m, 0);
    const bool b = zhang_suen_pass(m, 1);
    if (!a && !b) break;
  }
  // Staircase corners can leave 2x2 blocks; thin them through simple points.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y + 1 < m.height(); ++y)
      for (int x = 0; x + 1 < m.width(); ++x) {
        if (!(m.get(x, y) && m.get(x + 1, y) && m.get(x, y + 1) && m.get(x + 1, y + 1))) continue;
        for (const auto& [px, py] : {std::pair{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}}) {
          if (is_simple(m, px, py)) {
            m.set(px, py, false);
            changed = true;
            break;
          }
        }
      }
  }
  return m;
}

// --- rectangles ---------------------------------------------------------------

AxisRect max_inscribed_rect(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> heights(static_cast<std::size_t>(w), 0);
  std::optional<AxisRect> best;
  long best_area = 0;

  auto consider = [&](int min_x, int max_x, int min_y, int max_y) {
    const AxisRect r{Pixel(min_x, min_y), Pixel(max_x, max_y)};
    const long area = r.area();
    if (!best || area > best_area ||
        (area == best_area && std::pair(min_y, min_x) < std::pair(best->min.y(), best->min.x()))) {
      best = r;
      best_area = area;
    }
  };

  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) heights[x] = mask.get(x, y) ? heights[x] + 1 : 0;
    // Largest rectangle in the histogram of column heights ending at row y.
    stack.clear();
    for (int x = 0; x <= w; ++x) {
      const int cur = x < w ? heights[x] : 0;
      while (!stack.empty() && heights[stack.back()] >= cur) {
        const int top = stack.back();
        stack.pop_back();
        const int bar = heights[top];
        if (bar == 0) continue;
        const int left = stack.empty() ? 0 : stack.back() + 1;
        // Equal-height bars pop in sequence; the last pop sees the full span.
        consider(left, x - 1, y - bar + 1, y);
      }
      stack.push_back(x);
    }
  }
  if (!best) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel");
  return *best;
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

OrientedRect min_area_rect(const BinaryMask& mask) {
  // Only the ends of each row can be hull vertices.
  std::vector<Eigen::Vector2d> ends;
  std::vector<Pixel> centres;
  for (int y = 0; y < mask.height(); ++y) {
    int first = -1, last = -1;
    for (int x = 0; x < mask.width(); ++x)
      if (mask.get(x, y)) {
        if (first < 0) first = x;
        last = x;
        if (centres.size() < 3) centres.emplace_back(x, y);
        else {
          // keep a witness that breaks collinearity if one exists
          const Pixel& a = centres[0];
          const Pixel& b = centres[1];
          const long c = static_cast<long>(b.x() - a.x()) * (y - a.y()) - static_cast<long>(b.y() - a.y()) * (x - a.x());
          const Pixel& w = centres[2];
          const long cw = static_cast<long>(b.x() - a.x()) * (w.y() - a.y()) - static_cast<long>(b.y() - a.y()) * (w.x() - a.x());
          if (cw == 0 && c != 0) centres[2] = Pixel(x, y);
        }
      }
    if (first < 0) continue;
    ends.emplace_back(first, y);
    if (last != first) ends.emplace_back(last, y);
  }
  if (centres.size() < 3) throw Error(ErrorCode::DegenerateGeometry, "fewer than 3 foreground pixels");
  {
    const Pixel& a = centres[0];
    const Pixel& b = centres[1];
    const Pixel& w = centres[2];
    const long c = static_cast<long>(b.x() - a.x()) * (w.y() - a.y()) - static_cast<long>(b.y() - a.y()) * (w.x() - a.x());
    if (c == 0) throw Error(ErrorCode::DegenerateGeometry, "foreground pixels are collinear");
  }

  const auto hull = convex_hull(std::move(ends));
  OrientedRect best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d edge = (hull[(i + 1) % hull.size()] - hull[i]).normalized();
    const Eigen::Vector2d normal(-edge.y(), edge.x());
    double lo_e = std::numeric_limits<double>::infinity(), hi_e = -lo_e;
    double lo_n = lo_e, hi_n = -lo_e;
    for (const auto& p : hull) {
      const double pe = p.dot(edge), pn = p.dot(normal);
      lo_e = std::min(lo_e, pe);
      hi_e = std::max(hi_e, pe);
      lo_n = std::min(lo_n, pn);
      hi_n = std::max(hi_n, pn);
    }
    // A run of n pixel centres spans n pixels.
    const double ext_e = hi_e - lo_e + 1.0, ext_n = hi_n - lo_n + 1.0;
    const double area = ext_e * ext_n;
    const Eigen::Vector2d centre = edge * 0.5 * (lo_e + hi_e) + normal * 0.5 * (lo_n + hi_n);

    OrientedRect cand;
    cand.center = centre;
    Eigen::Vector2d width_axis = ext_e <= ext_n ? edge : normal;
    cand.half_extents = Eigen::Vector2d(0.5 * std::min(ext_e, ext_n), 0.5 * std::max(ext_e, ext_n));
    double angle = std::atan2(width_axis.y(), width_axis.x());
    while (angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
    while (angle > std::numbers::pi / 2) angle -= std::numbers::pi;
    cand.angle = angle;

    const double tol = 1e-9 * std::max(1.0, area);
    if (i == 0 || area < best_area - tol || (std::fabs(area - best_area) <= tol && std::fabs(angle) < std::fabs(best.angle))) {
      best = cand;
      best_area = std::min(area, best_area);
    }
  }
  return best;
}

// --- mask utilities -------------------------------------------------------------

BinaryMask fill_row_gaps(const BinaryMask& mask, int max_gap) {
  BinaryMask out = mask;
  for (int y = 0; y < mask.height(); ++y) {
    int last_fg = -1;
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      if (last_fg >= 0 && x - last_fg - 1 > 0 && x - last_fg - 1 <= max_gap)
        for (int g = last_fg + 1; g < x; ++g) out.set(g, y);
      last_fg = x;
    }
  }
  return out;
}

int count_components(const BinaryMask& mask) {
  Raster<std::uint8_t> seen(mask.width(), mask.height(), 0);
  int components = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y) || seen(x, y)) continue;
      ++components;
      stack.assign(1, Pixel(x, y));
      seen(x, y) = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x() + dx, ny = p.y() + dy;
            if (mask.at(nx, ny) && !seen(nx, ny)) {
              seen(nx, ny) = 1;
              stack.emplace_back(nx, ny);
            }
          }
      }
    }
  return components;
}

}  // namespace wrapbench
