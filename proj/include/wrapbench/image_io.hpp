#ifndef WRAPBENCH_IMAGE_IO_HPP
#define WRAPBENCH_IMAGE_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "wrapbench/imaging.hpp"

namespace wrapbench {

using Rgb8Image = Raster<Rgb8>;

Rgb8Image to_rgb(const HsvImage& image);
HsvImage to_hsv(const Rgb8Image& image);

/// Binary PPM (P6, 8 bit).
void write_ppm(std::ostream& out, const Rgb8Image& image);
Rgb8Image read_ppm(std::istream& in);

/// Binary PGM (P5, 16 bit big-endian), millimetre depth.
void write_pgm16(std::ostream& out, const DepthImage& depth);
DepthImage read_pgm16(std::istream& in);

/// ASCII point list. Header comment "# width height fx fy cx cy", then one
/// "p_x p_y p_z q_x q_y h s v" line per sample.
void write_point_list(std::ostream& out, const ColorizedDepthMap& map);
ColorizedDepthMap read_point_list(std::istream& in);

// File wrappers; throw Error(Io) when the file cannot be opened.
void save_ppm(const std::filesystem::path& path, const Rgb8Image& image);
void save_pgm16(const std::filesystem::path& path, const DepthImage& depth);
void save_point_list(const std::filesystem::path& path, const ColorizedDepthMap& map);
Rgb8Image load_ppm(const std::filesystem::path& path);
ColorizedDepthMap load_point_list(const std::filesystem::path& path);

}  // namespace wrapbench

#endif  // WRAPBENCH_IMAGE_IO_HPP
