#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "omniflow/raster.hpp"

namespace omniflow {

/// Cube-map faces. U/D are the +z/-z poles; F/B are +x/-x; R/L are +y/-y.
enum class Face { U, D, F, B, R, L };

inline constexpr std::array<Face, 6> kAllFaces{Face::U, Face::D, Face::F,
                                                Face::B, Face::R, Face::L};

std::string_view face_name(Face f);

/// Raw distortion value of a face at face coordinates (x, y) in [-1, 1]^2.
/// Polar faces fall off from 1 at the centre; equatorial faces grow from 0.
double face_density_at(Face face, double x, double y);

/// Square density raster of one cube face on an x, y meshgrid over [-1, 1]
/// that includes both endpoints.
struct CubeFaceDensity {
  Face face = Face::F;
  int size = 0;
  std::vector<double> values;  // row-major, row index follows y

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * size + i]; }

  /// Clamped bilinear sample at face coordinates (x, y) in [-1, 1].
  double sample(double x, double y) const;
};

/// Throws ArgumentError for size < 2.
CubeFaceDensity build_face_density(Face face, int size = 256);

std::array<CubeFaceDensity, 6> build_all_faces(int size = 256);

/// Equirectangular distortion density in [0.5, 1).
class DensityMap {
 public:
  DensityMap() = default;
  DensityMap(int width, int height, std::vector<double> values);

  /// Constant map, mostly for tests and synthetic evaluation.
  static DensityMap uniform(int width, int height, double d);

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int x, int y) const { return d_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const double> values() const { return d_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> d_;
};

/// Affine remap of a raw density in [0, 1] onto [0.5, 1).
inline constexpr double kRemapEpsilon = 1e-6;
double remap_density(double raw);

/// Face assignment and in-face coordinates of a unit vector.
struct FaceSample {
  Face face;
  double x;
  double y;
};
FaceSample locate_on_cube(double vx, double vy, double vz);

/// Unremapped equirectangular projection of the six faces (values in [0, 1]).
/// `faces` is indexed in kAllFaces order; all must share one size.
std::vector<double> cube_to_equirect_raw(std::span<const CubeFaceDensity> faces, int width,
                                         int height);

/// Projection followed by remap_density. Throws ArgumentError when a face is
/// missing or sizes differ, ShapeError unless width == 2 * height.
DensityMap cube_to_equirect_density(std::span<const CubeFaceDensity> faces, int width,
                                    int height);

/// Default map with 256x256 faces.
DensityMap build_density_map(int width, int height, int face_size = 256);

/// Half-open binning of a density map.
struct DensityBins {
  int width = 0;
  int height = 0;
  std::vector<int> index;             // -1 for pixels outside every bin
  std::vector<std::size_t> counts;    // one per bin
};

/// `edges` must be strictly increasing with at least two entries.
DensityBins density_bins(const DensityMap& d, std::span<const double> edges);

/// Bin of a single value, -1 if outside [edges.front(), edges.back()).
int find_bin(std::span<const double> edges, double value);

/// 16-bit grayscale export, sample = round(d * 65535).
Raster16 density_to_raster16(const DensityMap& d);

}  // namespace omniflow
