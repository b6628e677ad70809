// Regenerates the bundled data/ tree:
//
//   sample_pack/frames/NNNN.png   1024x512 grayscale panoramas with natural
//                                 image statistics (steep power spectrum,
//                                 heavy-tailed derivatives)
//   mini_dataset/video_K/...      four 8-frame 64x32 clips of a textured room
//                                 seen by a rotating camera, with exact
//                                 forward/backward flow and depth
//
// Usage: make_synthetic_data <out-dir>

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "omniflow/equirect_warp.hpp"
#include "omniflow/flow_io.hpp"
#include "omniflow/png_io.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace fs = std::filesystem;
using namespace omniflow;

namespace {

// Spelled out instead of std::uniform_real_distribution so the output does not
// depend on the standard library.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
};

std::string frame_name(int i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d.%s", i, ext);
  return buf;
}

/// Zero-mean, unit-variance random-phase field with amplitude spectrum amp(f),
/// f in cycles per pixel.
template <typename Amp>
std::vector<double> random_phase_field(int w, int h, std::uint64_t seed, Amp amp) {
  const int half = w / 2 + 1;
  Rng rng(seed);
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(h) * half);
  std::vector<double> field(static_cast<std::size_t>(w) * h);
  for (int ky = 0; ky < h; ++ky) {
    const double fy = (ky <= h / 2 ? ky : ky - h) / static_cast<double>(h);
    for (int kx = 0; kx < half; ++kx) {
      const double fx = kx / static_cast<double>(w);
      const double a = (kx == 0 && ky == 0) ? 0.0 : amp(std::hypot(fx, fy));
      const double phase = kTwoPi * rng.uniform();
      fftw_complex& c = spec[static_cast<std::size_t>(ky) * half + kx];
      c[0] = a * std::cos(phase);
      c[1] = a * std::sin(phase);
    }
  }
  fftw_plan plan = fftw_plan_dft_c2r_2d(h, w, spec, field.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  fftw_free(spec);

  double mean = 0.0, sq = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(field.size());
  for (double v : field) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(field.size()));
  for (double& v : field) v = (v - mean) / sd;
  return field;
}

// A 1/f^beta Gaussian field modulated by a slowly varying contrast envelope
// (a Gaussian scale mixture). The envelope makes derivatives heavy-tailed.
void write_sample_pack(const fs::path& dir) {
  constexpr int kW = 1024, kH = 512, kFrames = 8;
  constexpr double kBeta = 2.35, kModulation = 0.8, kEnvelopeCycles = 4.0, kContrast = 18.0;
  fs::create_directories(dir / "frames");
  for (int i = 0; i < kFrames; ++i) {
    const std::vector<double> g = random_phase_field(
        kW, kH, 1000 + i, [](double f) { return std::pow(f, -kBeta / 2.0); });
    const std::vector<double> env = random_phase_field(kW, kH, 2000 + i, [](double f) {
      const double c = f * kH / kEnvelopeCycles;
      return std::exp(-c * c);
    });
    Raster8 r(kW, kH, 1);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double v = 128.0 + kContrast * g[k] * std::exp(kModulation * env[k]);
      r.samples[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    write_png(r, dir / "frames" / frame_name(i, "png"));
  }
}

struct Wave {
  Vec3 k;
  double phase;
  double amp;
};

/// Colour of a scene direction: a few plane waves per channel.
std::array<double, 3> shade(const std::array<std::vector<Wave>, 3>& waves, const Vec3& d) {
  std::array<double, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    double v = 128.0;
    for (const Wave& w : waves[c]) v += w.amp * std::sin(dot(w.k, d) + w.phase);
    rgb[c] = std::clamp(v, 0.0, 255.0);
  }
  return rgb;
}

/// Distance from the origin to the walls of an axis-aligned box.
double room_depth(const Vec3& d) {
  constexpr double kHalf[3] = {4.0, 3.0, 1.5};
  const double comp[3] = {std::abs(d.x), std::abs(d.y), std::abs(d.z)};
  double t = 1e9;
  for (int i = 0; i < 3; ++i) {
    if (comp[i] > 0) t = std::min(t, kHalf[i] / comp[i]);
  }
  return t;
}

void write_video(const fs::path& dir, int video) {
  constexpr int kW = 64, kH = 32, kFrames = 8;
  for (const char* sub : {"frames", "flow_fw", "flow_bw", "depth"}) fs::create_directories(dir / sub);

  Rng rng(500 + video);
  std::array<std::vector<Wave>, 3> waves;
  for (auto& ch : waves) {
    for (int j = 0; j < 4; ++j) {
      const double theta = std::acos(2 * rng.uniform() - 1), phi = kTwoPi * rng.uniform();
      const double freq = 2.0 + 4.0 * rng.uniform();
      ch.push_back({freq * Vec3{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                std::cos(theta)},
                    kTwoPi * rng.uniform(), 15.0 + 20.0 * rng.uniform()});
    }
  }
  // Per-frame camera rotation of a few degrees.
  const double deg = kPi / 180.0;
  const Rotation3 step = rotation_from_euler((rng.uniform() - 0.5) * 6 * deg,
                                             (rng.uniform() - 0.5) * 6 * deg,
                                             (2.0 + 4.0 * rng.uniform()) * deg);
  const Rotation3 back = step.inverse();

  Rotation3 pose;  // frame t shows the scene rotated by step^t
  for (int t = 0; t < kFrames; ++t) {
    const Rotation3 to_scene = pose.inverse();
    Raster8 img(kW, kH, 3);
    Image depth(kW, kH, 1);
    for (int y = 0; y < kH; ++y) {
      for (int x = 0; x < kW; ++x) {
        const Vec3 s = to_scene.apply(lift_pixel(x, y, kW, kH));
        const auto rgb = shade(waves, s);
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(rgb[c]));
        depth.at(x, y) = static_cast<float>(room_depth(s));
      }
    }
    write_png(img, dir / "frames" / frame_name(t, "png"));
    write_depth_pfm(depth, dir / "depth" / frame_name(t, "pfm"));

    if (t + 1 < kFrames) {
      FlowField fw(kW, kH), bw(kW, kH);
      for (int y = 0; y < kH; ++y) {
        for (int x = 0; x < kW; ++x) {
          const Vec3 p = lift_pixel(x, y, kW, kH);
          const PixelCoord f = project_to_pixel(step.apply(p), kW, kH);
          const PixelCoord b = project_to_pixel(back.apply(p), kW, kH);
          fw.u(x, y) = static_cast<float>(wrap_horizontal(f.col - x, kW));
          fw.v(x, y) = static_cast<float>(f.row - y);
          bw.u(x, y) = static_cast<float>(wrap_horizontal(b.col - x, kW));
          bw.v(x, y) = static_cast<float>(b.row - y);
        }
      }
      write_flo(fw, dir / "flow_fw" / frame_name(t, "flo"));
      write_flo(bw, dir / "flow_bw" / frame_name(t, "flo"));
    }
    pose = step * pose;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_synthetic_data <out-dir>\n";
    return 1;
  }
  const fs::path out = argv[1];
  try {
    write_sample_pack(out / "sample_pack");
    for (int v = 0; v < 4; ++v) write_video(out / "mini_dataset" / ("video_" + std::to_string(v)), v);
  } catch (const std::exception& e) {
    std::cerr << "make_synthetic_data: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
