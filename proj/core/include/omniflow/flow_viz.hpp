#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omniflow/raster.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace omniflow {

/// Chord displacement on the unit sphere between each pixel centre and the
/// end point of its flow vector.
struct SphereMotionField {
  int width = 0;
  int height = 0;
  std::vector<Vec3> motion;

  const Vec3& at(int x, int y) const {
    return motion[static_cast<std::size_t>(y) * width + x];
  }
};

SphereMotionField flow_to_sphere_motion(const FlowField& f);

/// The 55-entry Middlebury colour wheel (RY 15, YG 6, GC 4, CB 11, BM 13, MR 6).
const std::vector<std::array<std::uint8_t, 3>>& color_wheel();

/// Colour of one flow vector; magnitudes are divided by `clip` and saturate at 1.
std::array<std::uint8_t, 3> flow_color(double u, double v, double clip);

/// Middlebury colour coding. Throws ArgumentError unless clip > 0.
Raster8 encode_flow_rgb(const FlowField& f, double clip = 40.0);

/// RGBA coding of sphere motion plus the per-image normalisers used.
struct SphereRgba {
  Raster8 image;        // 4 channels
  double max_xy = 0.0;  // clip applied to the (x, y) colour wheel lookup
  double max_z = 0.0;   // alpha maps z from [-max_z, max_z] onto [0, 255]
};

SphereRgba encode_sphere_rgba(const SphereMotionField& m);

}  // namespace omniflow
