#pragma once

#include "holotomo/core.hpp"

#include <filesystem>
#include <vector>

namespace holotomo::io {

// 16-bit binary PGM (P5, maxval 65535, big-endian samples). Raster rows
// run along the y index, columns along the x index. Values are raw
// counts; callers clamp to [0, 65535].
void save_pgm16(const std::filesystem::path& path, const RealArrayXd& counts);
RealArrayXd load_pgm16(const std::filesystem::path& path);

// Minimal PNG writer (stored deflate blocks, no compression). values are
// expected in [0, 1]; gray8 maps linearly, rgb8 takes three planes.
void save_png_gray8(const std::filesystem::path& path, const RealArrayXd& values);
void save_png_rgb8(const std::filesystem::path& path, const RealArrayXd& r, const RealArrayXd& g,
                   const RealArrayXd& b);

// Diverging blue-gray-red colormap on [0, 1], used for phase exports.
void diverging_colormap(const RealArrayXd& values, RealArrayXd& r, RealArrayXd& g, RealArrayXd& b);

}  // namespace holotomo::io
