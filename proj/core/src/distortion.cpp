#include "omniflow/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omniflow/error.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace omniflow {

namespace {

// Largest radius on the [-1, 1]^2 meshgrid, reached at the corners.
const double kMaxRadius = std::sqrt(2.0);

bool is_polar(Face f) { return f == Face::U || f == Face::D; }

int face_slot(Face f) { return static_cast<int>(f); }

}  // namespace

std::string_view face_name(Face f) {
  switch (f) {
    case Face::U: return "U";
    case Face::D: return "D";
    case Face::F: return "F";
    case Face::B: return "B";
    case Face::R: return "R";
    case Face::L: return "L";
  }
  return "?";
}

double face_density_at(Face face, double x, double y) {
  const double r = std::sqrt(x * x + y * y);
  return is_polar(face) ? 1.0 - r / kMaxRadius : r / kMaxRadius;
}

double CubeFaceDensity::sample(double x, double y) const {
  const double scale = 0.5 * (size - 1);
  const double gx = std::clamp((x + 1.0) * scale, 0.0, static_cast<double>(size - 1));
  const double gy = std::clamp((y + 1.0) * scale, 0.0, static_cast<double>(size - 1));
  const int i0 = std::min(static_cast<int>(gx), size - 2);
  const int j0 = std::min(static_cast<int>(gy), size - 2);
  const double tx = gx - i0;
  const double ty = gy - j0;
  const double top = (1.0 - tx) * at(i0, j0) + tx * at(i0 + 1, j0);
  const double bottom = (1.0 - tx) * at(i0, j0 + 1) + tx * at(i0 + 1, j0 + 1);
  return (1.0 - ty) * top + ty * bottom;
}

CubeFaceDensity build_face_density(Face face, int size) {
  if (size < 2) throw ArgumentError("face size must be at least 2");
  CubeFaceDensity out;
  out.face = face;
  out.size = size;
  out.values.resize(static_cast<std::size_t>(size) * size);
  // Same spacing as a linspace(-1, 1, size) meshgrid; corners hit r = sqrt(2).
  auto coord = [size](int i) { return -1.0 + 2.0 * i / (size - 1); };
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i)
      out.values[static_cast<std::size_t>(j) * size + i] = face_density_at(face, coord(i), coord(j));
  return out;
}

std::array<CubeFaceDensity, 6> build_all_faces(int size) {
  std::array<CubeFaceDensity, 6> faces;
  for (Face f : kAllFaces) faces[face_slot(f)] = build_face_density(f, size);
  return faces;
}

DensityMap::DensityMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), d_(std::move(values)) {
  if (width < 0 || height < 0 ||
      d_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeError("density map value count does not match its dimensions");
  }
}

DensityMap DensityMap::uniform(int width, int height, double d) {
  return DensityMap(width, height,
                    std::vector<double>(static_cast<std::size_t>(width) * height, d));
}

double remap_density(double raw) { return 0.5 + 0.5 * raw * (1.0 - kRemapEpsilon); }

FaceSample locate_on_cube(double vx, double vy, double vz) {
  const double ax = std::abs(vx), ay = std::abs(vy), az = std::abs(vz);
  if (az >= ax && az >= ay) {
    return {vz >= 0.0 ? Face::U : Face::D, vx / az, vy / az};
  }
  if (ax >= ay) {
    return {vx >= 0.0 ? Face::F : Face::B, vy / ax, vz / ax};
  }
  return {vy >= 0.0 ? Face::R : Face::L, vx / ay, vz / ay};
}

std::vector<double> cube_to_equirect_raw(std::span<const CubeFaceDensity> faces, int width,
                                         int height) {
  require_equirect(width, height);
  if (faces.size() != kAllFaces.size()) {
    throw ArgumentError("cube projection needs all six faces, got " +
                        std::to_string(faces.size()));
  }
  for (std::size_t k = 0; k < faces.size(); ++k) {
    if (faces[k].face != kAllFaces[k]) {
      throw ArgumentError("missing cube face " + std::string(face_name(kAllFaces[k])));
    }
    if (faces[k].size != faces[0].size || faces[k].size < 2 ||
        faces[k].values.size() != static_cast<std::size_t>(faces[k].size) * faces[k].size) {
      throw ArgumentError("cube faces must share one valid size");
    }
  }
  std::vector<double> raw(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 s = lift_pixel(x, y, width, height);
      const FaceSample fs = locate_on_cube(s.x, s.y, s.z);
      raw[static_cast<std::size_t>(y) * width + x] = faces[face_slot(fs.face)].sample(fs.x, fs.y);
    }
  }
  return raw;
}

DensityMap cube_to_equirect_density(std::span<const CubeFaceDensity> faces, int width,
                                    int height) {
  std::vector<double> d = cube_to_equirect_raw(faces, width, height);
  for (double& v : d) v = remap_density(v);
  return DensityMap(width, height, std::move(d));
}

DensityMap build_density_map(int width, int height, int face_size) {
  const auto faces = build_all_faces(face_size);
  return cube_to_equirect_density(faces, width, height);
}

int find_bin(std::span<const double> edges, double value) {
  if (!(value >= edges.front()) || !(value < edges.back())) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<int>(it - edges.begin()) - 1;
}

DensityBins density_bins(const DensityMap& d, std::span<const double> edges) {
  if (edges.size() < 2) throw ArgumentError("density bins need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw ArgumentError("density bin edges must be strictly increasing");
    }
  }
  DensityBins out;
  out.width = d.width();
  out.height = d.height();
  out.counts.assign(edges.size() - 1, 0);
  out.index.resize(d.values().size());
  for (std::size_t i = 0; i < out.index.size(); ++i) {
    const int b = find_bin(edges, d.values()[i]);
    out.index[i] = b;
    if (b >= 0) ++out.counts[b];
  }
  return out;
}

Raster16 density_to_raster16(const DensityMap& d) {
  Raster16 out(d.width(), d.height(), 1);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double v = std::clamp(d.values()[i], 0.0, 1.0);
    out.samples[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  return out;
}

}  // namespace omniflow
