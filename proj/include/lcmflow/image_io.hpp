#pragma once

#include "lcmflow/image.hpp"
#include "lcmflow/warp.hpp"

#include <filesystem>

namespace lcmflow {

/// Reads 8- or 16-bit grayscale/RGB PNG or PGM/PPM (P2, P3, P5, P6).
/// Samples are divided by the type maximum. Alpha channels are rejected.
Raster read_raster(const std::filesystem::path& path);

/// read_raster followed by to_grayscale.
Image read_image(const std::filesystem::path& path);

/// Grayscale PNG; values are clamped to [0,1] and quantized to 8 or 16 bits.
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 8);
void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Binary PGM (P5) with maxval 255 or 65535.
void write_pgm(const std::filesystem::path& path, const Image& img, int maxval = 255);

} // namespace lcmflow
