#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wrapbench/error.hpp"
#include "wrapbench/image_io.hpp"
#include "wrapbench/imaging.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace wrapbench;
using wbtest::otsu_oracle;
using wbtest::throws_code;

namespace {

struct Rect {
  int x0, y0, x1, y1;
  long area() const { return static_cast<long>(x1 - x0 + 1) * (y1 - y0 + 1); }
};

bool all_on(const BinaryMask& m, const Rect& r) {
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x)
      if (!m.get(x, y)) return false;
  return true;
}

// Every rectangle; best area, then smallest (min_y, min_x).
std::optional<Rect> inscribed_oracle(const BinaryMask& m) {
  std::optional<Rect> best;
  for (int y0 = 0; y0 < m.height(); ++y0)
    for (int x0 = 0; x0 < m.width(); ++x0)
      for (int y1 = y0; y1 < m.height(); ++y1)
        for (int x1 = x0; x1 < m.width(); ++x1) {
          const Rect r{x0, y0, x1, y1};
          if (!all_on(m, r)) break;
          if (!best || r.area() > best->area() ||
              (r.area() == best->area() && (r.y0 < best->y0 || (r.y0 == best->y0 && r.x0 < best->x0))))
            best = r;
        }
  return best;
}

struct ScanRect {
  double area, width, angle;
};

// Minimum-area rectangle around the pixel centres, one pixel added to each
// extent, by brute-force angle scan over [0, 180) degrees.
ScanRect angle_scan_oracle(const BinaryMask& m, double step_deg = 0.05) {
  std::vector<Eigen::Vector2d> corners;
  for (const Pixel& p : m.foreground()) corners.emplace_back(p.x(), p.y());
  ScanRect best{std::numeric_limits<double>::infinity(), 0, 0};
  for (double deg = 0.0; deg < 180.0; deg += step_deg) {
    const double a = deg * std::numbers::pi / 180.0;
    const Eigen::Vector2d u(std::cos(a), std::sin(a)), v(-std::sin(a), std::cos(a));
    double ulo = 1e18, uhi = -1e18, vlo = 1e18, vhi = -1e18;
    for (const auto& c : corners) {
      ulo = std::min(ulo, c.dot(u));
      uhi = std::max(uhi, c.dot(u));
      vlo = std::min(vlo, c.dot(v));
      vhi = std::max(vhi, c.dot(v));
    }
    const double eu = uhi - ulo + 1.0, ev = vhi - vlo + 1.0;
    if (eu * ev < best.area) {
      // angle of the short side's direction
      double ang = eu <= ev ? a : a + std::numbers::pi / 2;
      while (ang > std::numbers::pi / 2) ang -= std::numbers::pi;
      best = {eu * ev, std::min(eu, ev), ang};
    }
  }
  return best;
}

// 8-connected component count by flood fill.
int components_oracle(const BinaryMask& m) {
  std::vector<int> seen(static_cast<std::size_t>(m.width()) * m.height(), 0);
  int n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen[y * m.width() + x]) continue;
      ++n;
      std::vector<Pixel> stack{{x, y}};
      seen[y * m.width() + x] = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = p.x() + dx, qy = p.y() + dy;
            if (m.at(qx, qy) && !seen[qy * m.width() + qx]) {
              seen[qy * m.width() + qx] = 1;
              stack.emplace_back(qx, qy);
            }
          }
      }
    }
  return n;
}

BinaryMask random_blobs(std::mt19937& rng, int w, int h, int blobs) {
  BinaryMask m(w, h);
  std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1), ext(1, 6);
  for (int b = 0; b < blobs; ++b) {
    const int x0 = px(rng), y0 = py(rng), bw = ext(rng), bh = ext(rng);
    for (int y = y0; y < std::min(h, y0 + bh); ++y)
      for (int x = x0; x < std::min(w, x0 + bw); ++x) m.set(x, y);
  }
  return m;
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("otsu worked examples") {
  // The expected thresholds come from otsu_oracle, frozen here.
  std::vector<std::uint64_t> a(6, 0);
  a[0] = a[1] = a[4] = a[5] = 5;
  CHECK(otsu_oracle(a) == 1);
  CHECK(otsu_threshold(a) == 1);

  std::vector<std::uint64_t> b(8, 0);
  b[0] = b[7] = 10;
  CHECK(otsu_oracle(b) == 0);
  CHECK(otsu_threshold(b) == 0);

  std::vector<std::uint64_t> c(8, 0);
  c[3] = 20;
  CHECK(throws_code(ErrorCode::UnimodalDegenerate, [&] { otsu_threshold(c); }));
  CHECK(throws_code(ErrorCode::UnimodalDegenerate, [&] { otsu_threshold(std::vector<std::uint64_t>(5, 0)); }));
}

TEST_CASE("otsu matches the exhaustive maximizer on random histograms") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> bins(2, 40), sparse(0, 3);
  std::uniform_int_distribution<std::uint64_t> count(1, 500);
  int checked = 0;
  while (checked < 1000) {
    std::vector<std::uint64_t> h(bins(rng));
    for (auto& v : h) v = sparse(rng) == 0 ? 0 : count(rng);
    if (std::count_if(h.begin(), h.end(), [](auto v) { return v > 0; }) < 2) continue;
    REQUIRE(otsu_threshold(h) == otsu_oracle(h));
    ++checked;
  }
}

TEST_CASE("otsu breaks symmetric ties toward the smallest threshold") {
  // Symmetric two-mode histograms with an empty plateau between the modes.
  for (int gap = 1; gap < 6; ++gap) {
    std::vector<std::uint64_t> h(2 + gap + 2, 0);
    h[0] = h[1] = 9;
    h[h.size() - 1] = h[h.size() - 2] = 9;
    CHECK(otsu_threshold(h) == otsu_oracle(h));
    CHECK(otsu_threshold(h) == 1);
  }
}

TEST_CASE("hue histogram") {
  std::vector<Hsv> zeros(10, Hsv{0.0, 1.0, 1.0});
  auto h = hue_histogram(zeros, 36);
  CHECK(h[0] == 10);
  CHECK(std::accumulate(h.begin() + 1, h.end(), std::uint64_t{0}) == 0);

  std::vector<Hsv> px{{10, 1, 1}, {10, 1, 1}, {200, 1, 1}};
  h = hue_histogram(px, 36);
  CHECK(h[1] == 2);
  CHECK(h[20] == 1);
  CHECK(std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == 3);

  h = hue_histogram(std::vector<Hsv>{}, 36);
  CHECK(h.size() == 36);
  CHECK(std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == 0);
}

TEST_CASE("hue helpers wrap around") {
  CHECK(normalize_hue(-10.0) == doctest::Approx(350.0));
  CHECK(normalize_hue(725.0) == doctest::Approx(5.0));
  CHECK(hue_distance(358.0, 2.0) == doctest::Approx(4.0));
  CHECK(hue_distance(0.0, 180.0) == doctest::Approx(180.0));
}

TEST_CASE("rotated histogram centres the dominant mode") {
  std::vector<Hsv> px;
  for (int i = 0; i < 50; ++i) px.push_back({355.0 + (i % 10), 1, 1});  // straddles 0
  for (int i = 0; i < 5; ++i) px.push_back({180.0, 1, 1});
  const auto r = rotated_hue_histogram(px, 36);
  const auto top = std::max_element(r.counts.begin(), r.counts.end()) - r.counts.begin();
  CHECK(top == 18);
  CHECK(r.counts[17] + r.counts[18] + r.counts[19] == 50);
  CHECK(r.counts[0] + r.counts[35] == 5);  // the opposite mode lands on the seam
  CHECK(r.unrotate(r.rotate(123.0)) == doctest::Approx(123.0));
  CHECK(std::accumulate(r.counts.begin(), r.counts.end(), std::uint64_t{0}) == px.size());
}

TEST_CASE("skeletonize worked examples") {
  BinaryMask bar(24, 7);
  for (int y = 2; y < 5; ++y)
    for (int x = 2; x < 22; ++x) bar.set(x, y);
  const auto s = skeletonize(bar);
  int on = 0;
  for (const Pixel& p : s.foreground()) {
    CHECK(p.y() == 3);
    ++on;
  }
  CHECK(on >= 18);
  CHECK(on <= 20);
  CHECK(s.at(3, 3));
  CHECK(s.at(20, 3));

  CHECK(skeletonize(BinaryMask(8, 8)).none());

  BinaryMask diag(12, 12);
  for (int i = 0; i < 12; ++i) diag.set(i, i);
  CHECK(skeletonize(diag) == diag);
}

TEST_CASE("skeletonize properties on random masks") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask m = random_blobs(rng, 30, 24, 6);
    const BinaryMask s = skeletonize(m);
    CHECK(s.count() <= m.count());
    for (const Pixel& p : s.foreground()) REQUIRE(m.get(p.x(), p.y()));
    for (int y = 0; y + 1 < s.height(); ++y)
      for (int x = 0; x + 1 < s.width(); ++x)
        REQUIRE_FALSE((s.get(x, y) && s.get(x + 1, y) && s.get(x, y + 1) && s.get(x + 1, y + 1)));
    REQUIRE(components_oracle(s) == components_oracle(m));
    CHECK(count_components(m) == components_oracle(m));
  }
}

TEST_CASE("max inscribed rectangle worked examples") {
  BinaryMask full(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) full.set(x, y);
  auto r = max_inscribed_rect(full);
  CHECK(r.min == Pixel(0, 0));
  CHECK(r.max == Pixel(9, 9));

  BinaryMask notch = full;
  notch.set(0, 0, false);
  r = max_inscribed_rect(notch);
  CHECK(r.area() == 90);
  const auto o = inscribed_oracle(notch);
  CHECK(r.min == Pixel(o->x0, o->y0));
  CHECK(r.max == Pixel(o->x1, o->y1));

  CHECK(throws_code(ErrorCode::EmptyMask, [] { max_inscribed_rect(BinaryMask(5, 5)); }));
}

TEST_CASE("max inscribed rectangle equals exhaustive enumeration") {
  std::mt19937 rng(3);
  std::bernoulli_distribution on(0.7);
  for (int trial = 0; trial < 300; ++trial) {
    BinaryMask m(1 + trial % 11, 1 + (trial * 7) % 9);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) m.set(x, y, on(rng));
    if (m.none()) continue;
    const auto got = max_inscribed_rect(m);
    const auto want = inscribed_oracle(m);
    REQUIRE(got.area() == want->area());
    REQUIRE(got.min == Pixel(want->x0, want->y0));
    REQUIRE(got.max == Pixel(want->x1, want->y1));
    CHECK(all_on(m, {got.min.x(), got.min.y(), got.max.x(), got.max.y()}));
  }
}

TEST_CASE("min area rectangle worked examples") {
  BinaryMask block(40, 40);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 14; ++x) block.set(x, y);
  auto r = min_area_rect(block);
  CHECK(r.width() == doctest::Approx(4.0));
  CHECK(r.length() == doctest::Approx(20.0));
  CHECK(r.angle == doctest::Approx(0.0));

  // 4 x 20 block rotated by 30 degrees, rasterized by pixel centre.
  BinaryMask rot(80, 80);
  const double a = 30.0 * std::numbers::pi / 180.0;
  const Eigen::Vector2d u(std::cos(a), std::sin(a)), v(-std::sin(a), std::cos(a));
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 80; ++x) {
      const Eigen::Vector2d p(x + 0.5 - 40.0, y + 0.5 - 40.0);
      if (std::fabs(p.dot(u)) <= 2.0 && std::fabs(p.dot(v)) <= 10.0) rot.set(x, y);
    }
  const auto scan = angle_scan_oracle(rot);
  r = min_area_rect(rot);
  CHECK(r.area() <= scan.area + 1e-6);
  CHECK(r.area() >= scan.area * (1.0 - 1e-3));
  CHECK(std::fabs(r.width() - 4.0) <= 1.0);
  CHECK(std::fabs(r.width() - scan.width) <= 0.05);
  CHECK(std::fabs(r.angle * 180.0 / std::numbers::pi - 30.0) <= 2.0);
  CHECK(std::fabs(r.angle - scan.angle) * 180.0 / std::numbers::pi <= 2.0);

  BinaryMask one(5, 5);
  one.set(2, 2);
  CHECK(throws_code(ErrorCode::DegenerateGeometry, [&] { min_area_rect(one); }));
  BinaryMask line(10, 10);
  for (int i = 0; i < 10; ++i) line.set(i, 4);
  CHECK(throws_code(ErrorCode::DegenerateGeometry, [&] { min_area_rect(line); }));
}

TEST_CASE("min area rectangle against the angle scan and the bounding box") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryMask m = random_blobs(rng, 24, 24, 3);
    std::optional<OrientedRect> r;
    try {
      r = min_area_rect(m);
    } catch (const Error&) {
      continue;
    }
    int x0 = 1 << 20, y0 = 1 << 20, x1 = -1, y1 = -1;
    for (const Pixel& p : m.foreground()) {
      x0 = std::min(x0, p.x());
      y0 = std::min(y0, p.y());
      x1 = std::max(x1, p.x());
      y1 = std::max(y1, p.y());
    }
    const double aabb = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
    CHECK(r->area() <= aabb + 1e-9);
    CHECK(r->area() <= angle_scan_oracle(m, 0.25).area + 1e-6);
    CHECK(r->width() <= r->length());
    CHECK(r->angle > -std::numbers::pi / 2);
    CHECK(r->angle <= std::numbers::pi / 2);
  }
}

TEST_CASE("fill_row_gaps closes bounded gaps only") {
  BinaryMask m(12, 1);
  m.set(0, 0);
  m.set(4, 0);
  m.set(11, 0);
  const auto f = fill_row_gaps(m, 3);
  for (int x = 0; x <= 4; ++x) CHECK(f.get(x, 0));
  for (int x = 5; x <= 10; ++x) CHECK_FALSE(f.get(x, 0));
}

TEST_CASE("camera projection and rays agree") {
  CameraModel cam;
  cam.world_from_camera.translation() = Eigen::Vector3d(0.1, -0.2, 0.3);
  cam.world_from_camera.linear() = Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Eigen::Vector3d world = cam.world_from_camera * Eigen::Vector3d(0.05, -0.02, 0.8);
  const auto px = cam.project(world);
  REQUIRE(px);
  const Eigen::Vector3d ray = cam.ray(px->x(), px->y());
  const Eigen::Vector3d to = (world - cam.position()).normalized();
  CHECK((ray - to).norm() < 1e-9);
  CHECK(cam.depth_of(world) == doctest::Approx(0.8));
  CHECK_FALSE(cam.project(cam.world_from_camera * Eigen::Vector3d(0, 0, -1)));
}

TEST_CASE("colorized depth map invariants") {
  ColorizedDepthMap map;
  map.width = 4;
  map.height = 3;
  map.samples = {{{0, 0, 1}, {0, 0}, {}}, {{0, 0, 2}, {3, 2}, {}}};
  CHECK_NOTHROW(map.validate());
  CHECK(map.pixel_index()(3, 2) == 1);
  CHECK(map.pixel_index()(1, 1) == -1);
  map.samples.push_back({{0, 0, 3}, {3, 2}, {}});
  CHECK(throws_code(ErrorCode::DimensionMismatch, [&] { map.validate(); }));
  map.samples.back().pixel = Pixel(4, 0);
  CHECK(throws_code(ErrorCode::DimensionMismatch, [&] { map.validate(); }));
}

TEST_CASE("image and point list formats round-trip") {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> byte(0, 255), mm(0, 65535);
  Rgb8Image img(7, 5);
  for (auto& p : img.pixels()) p = {static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                                    static_cast<std::uint8_t>(byte(rng))};
  std::stringstream ppm;
  write_ppm(ppm, img);
  CHECK(ppm.str().rfind("P6", 0) == 0);
  CHECK(read_ppm(ppm) == img);

  DepthImage depth(6, 4);
  for (auto& d : depth.pixels()) d = static_cast<std::uint16_t>(mm(rng));
  std::stringstream pgm;
  write_pgm16(pgm, depth);
  CHECK(pgm.str().rfind("P5", 0) == 0);
  CHECK(read_pgm16(pgm) == depth);

  ColorizedDepthMap map;
  map.width = 6;
  map.height = 4;
  map.samples = {{{0.25, -0.5, 1.125}, {1, 2}, {12.5, 0.5, 0.25}}, {{1, 2, 3}, {5, 3}, {300, 1, 1}}};
  std::stringstream pts;
  write_point_list(pts, map);
  const auto back = read_point_list(pts);
  CHECK(back.width == 6);
  CHECK(back.height == 4);
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[0].point.isApprox(map.samples[0].point));
  CHECK(back.samples[1].pixel == Pixel(5, 3));
  CHECK(back.samples[0].color.h == doctest::Approx(12.5));

  std::istringstream bad("P3\n1 1\n255\n0 0 0\n");
  CHECK(throws_code(ErrorCode::Io, [&] { read_ppm(bad); }));
}

TEST_CASE("hsv to rgb conversion round-trips within quantization") {
  for (double h = 0; h < 360; h += 7.5) {
    const Hsv c{h, 0.8, 0.9};
    const Hsv back = to_hsv(to_rgb(c));
    CHECK(hue_distance(back.h, h) < 1.5);
    CHECK(back.s == doctest::Approx(0.8).epsilon(0.02));
    CHECK(back.v == doctest::Approx(0.9).epsilon(0.01));
  }
}

}  // TEST_SUITE
