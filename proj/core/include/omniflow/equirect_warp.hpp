#pragma once

#include <array>
#include <span>
#include <vector>

#include "omniflow/raster.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace omniflow {

enum class Interp { nearest, bilinear };

/// Precomputed inverse mapping that realises a sphere rotation on an
/// equirectangular raster: destination pixel p reads from source position
/// (src_col(p), src_row(p)).
class WarpMap {
 public:
  WarpMap() = default;

  int width() const { return width_; }
  int height() const { return height_; }
  const Rotation3& rotation() const { return rotation_; }

  double src_col(int x, int y) const { return col_[index(x, y)]; }
  double src_row(int x, int y) const { return row_[index(x, y)]; }
  std::span<const double> src_cols() const { return col_; }
  std::span<const double> src_rows() const { return row_; }

 private:
  friend WarpMap build_warp_map(const Rotation3& r, int width, int height);

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  Rotation3 rotation_;
  std::vector<double> col_;
  std::vector<double> row_;
};

/// Source position of destination pixel (col, row) for rotation r:
/// project(r^-1 * lift(col, row)). Continuous in both arguments.
PixelCoord warp_source(const Rotation3& r, double col, double row, int width, int height);

/// Builds the per-pixel map. The identity rotation maps every pixel to itself
/// exactly. Throws ShapeError unless width == 2 * height.
WarpMap build_warp_map(const Rotation3& r, int width, int height);

/// Map of the reverse rotation.
WarpMap inverse_warp(const WarpMap& w);

/// Samples channel c at a continuous position: columns wrap, rows clamp.
float sample(ImageView img, double col, double row, int c, Interp interp);

/// Bilinear/nearest flow sample with the same boundary rules as sample().
std::array<float, 2> sample_flow(const FlowField& f, double col, double row, Interp interp);

/// Resamples every channel of `in` through `w` into `out`. Views must share
/// the map's dimensions; `out` must not alias `in`.
void warp_image_into(ImageView in, const WarpMap& w, Interp interp, MutableImageView out);

Image warp_image(const Image& img, const WarpMap& w, Interp interp = Interp::bilinear);

/// Reprojects a flow field under the rotation: both endpoints of the source
/// displacement are lifted to the sphere, rotated by r and projected back.
/// The horizontal component is wrapped into (-width/2, width/2].
FlowField warp_flow(const FlowField& f, const WarpMap& w, const Rotation3& r,
                    Interp interp = Interp::bilinear);

/// Wraps a horizontal displacement into (-width/2, width/2].
double wrap_horizontal(double du, int width);

}  // namespace omniflow
