#include "wrapbench/image_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "wrapbench/error.hpp"

namespace wrapbench {

Rgb8Image to_rgb(const HsvImage& image) {
  Rgb8Image out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) out(x, y) = to_rgb(image(x, y));
  return out;
}

HsvImage to_hsv(const Rgb8Image& image) {
  HsvImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) out(x, y) = to_hsv(image(x, y));
  return out;
}

namespace {

// Reads the next header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw Error(ErrorCode::Io, "truncated netpbm header");
}

struct NetpbmHeader {
  int width = 0, height = 0, maxval = 0;
};

NetpbmHeader read_header(std::istream& in, const char* magic) {
  if (header_token(in) != magic) throw Error(ErrorCode::Io, std::string("expected ") + magic);
  NetpbmHeader h;
  h.width = std::stoi(header_token(in));
  h.height = std::stoi(header_token(in));
  h.maxval = std::stoi(header_token(in));
  in.get();  // single whitespace before the raster
  if (h.width <= 0 || h.height <= 0) throw Error(ErrorCode::Io, "bad netpbm dimensions");
  return h;
}

}  // namespace

void write_ppm(std::ostream& out, const Rgb8Image& image) {
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (const auto& p : image.pixels()) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
}

Rgb8Image read_ppm(std::istream& in) {
  const auto h = read_header(in, "P6");
  if (h.maxval != 255) throw Error(ErrorCode::Io, "only 8-bit PPM is supported");
  Rgb8Image image(h.width, h.height);
  for (auto& p : image.pixels()) {
    unsigned char rgb[3];
    if (!in.read(reinterpret_cast<char*>(rgb), 3)) throw Error(ErrorCode::Io, "truncated PPM raster");
    p = {rgb[0], rgb[1], rgb[2]};
  }
  return image;
}

void write_pgm16(std::ostream& out, const DepthImage& depth) {
  out << "P5\n" << depth.width() << ' ' << depth.height() << "\n65535\n";
  for (const auto v : depth.pixels()) {
    const char be[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    out.write(be, 2);
  }
}

DepthImage read_pgm16(std::istream& in) {
  const auto h = read_header(in, "P5");
  if (h.maxval < 256) throw Error(ErrorCode::Io, "only 16-bit PGM is supported");
  DepthImage depth(h.width, h.height);
  for (auto& v : depth.pixels()) {
    unsigned char be[2];
    if (!in.read(reinterpret_cast<char*>(be), 2)) throw Error(ErrorCode::Io, "truncated PGM raster");
    v = static_cast<std::uint16_t>((be[0] << 8) | be[1]);
  }
  return depth;
}

void write_point_list(std::ostream& out, const ColorizedDepthMap& map) {
  const auto& k = map.intrinsics;
  out << "# " << map.width << ' ' << map.height << ' ' << k.fx << ' ' << k.fy << ' ' << k.cx << ' ' << k.cy
      << '\n';
  out << std::setprecision(9);
  for (const auto& s : map.samples)
    out << s.point.x() << ' ' << s.point.y() << ' ' << s.point.z() << ' ' << s.pixel.x() << ' ' << s.pixel.y()
        << ' ' << s.color.h << ' ' << s.color.s << ' ' << s.color.v << '\n';
}

ColorizedDepthMap read_point_list(std::istream& in) {
  ColorizedDepthMap map;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      if (have_header) continue;
      char hash;
      ColorizedDepthMap hdr;
      if (ls >> hash >> hdr.width >> hdr.height >> hdr.intrinsics.fx >> hdr.intrinsics.fy >> hdr.intrinsics.cx >>
          hdr.intrinsics.cy) {
        map.width = hdr.width;
        map.height = hdr.height;
        map.intrinsics = hdr.intrinsics;
        have_header = true;
      }
      continue;
    }
    MapSample s;
    int qx, qy;
    if (!(ls >> s.point.x() >> s.point.y() >> s.point.z() >> qx >> qy >> s.color.h >> s.color.s >> s.color.v))
      throw Error(ErrorCode::Io, "malformed point line: " + line);
    s.pixel = Pixel(qx, qy);
    map.samples.push_back(s);
  }
  if (!have_header) throw Error(ErrorCode::Io, "point list has no dimension header");
  map.validate();
  return map;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return in;
}

}  // namespace

void save_ppm(const std::filesystem::path& path, const Rgb8Image& image) {
  auto out = open_out(path);
  write_ppm(out, image);
}

void save_pgm16(const std::filesystem::path& path, const DepthImage& depth) {
  auto out = open_out(path);
  write_pgm16(out, depth);
}

void save_point_list(const std::filesystem::path& path, const ColorizedDepthMap& map) {
  auto out = open_out(path);
  write_point_list(out, map);
}

Rgb8Image load_ppm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ppm(in);
}

ColorizedDepthMap load_point_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_point_list(in);
}

}  // namespace wrapbench
