#pragma once

#include <filesystem>

#include "omniflow/raster.hpp"

namespace omniflow {

struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
};

/// Header only; throws IoError / FormatError.
PngInfo read_png_info(const std::filesystem::path& path);

/// Decodes to floats on a 0..255 scale (16-bit inputs are divided by 257).
/// Palette and sub-byte images are expanded; alpha is kept.
Image read_png(const std::filesystem::path& path);

/// Atomic writes (temporary file plus rename).
void write_png(const Raster8& r, const std::filesystem::path& path);
void write_png(const Raster16& r, const std::filesystem::path& path);

/// Rounds and clamps to 0..255.
Raster8 to_raster8(const Image& img);

}  // namespace omniflow
