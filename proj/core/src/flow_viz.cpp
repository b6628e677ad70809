#include "omniflow/flow_viz.hpp"

#include <algorithm>
#include <cmath>

#include "omniflow/error.hpp"

namespace omniflow {

namespace {

std::vector<std::array<std::uint8_t, 3>> make_wheel() {
  constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
  std::vector<std::array<std::uint8_t, 3>> wheel;
  wheel.reserve(kRY + kYG + kGC + kCB + kBM + kMR);
  auto ramp = [](int i, int n) { return static_cast<std::uint8_t>(255 * i / n); };
  for (int i = 0; i < kRY; ++i) wheel.push_back({255, ramp(i, kRY), 0});
  for (int i = 0; i < kYG; ++i) wheel.push_back({static_cast<std::uint8_t>(255 - ramp(i, kYG)), 255, 0});
  for (int i = 0; i < kGC; ++i) wheel.push_back({0, 255, ramp(i, kGC)});
  for (int i = 0; i < kCB; ++i) wheel.push_back({0, static_cast<std::uint8_t>(255 - ramp(i, kCB)), 255});
  for (int i = 0; i < kBM; ++i) wheel.push_back({ramp(i, kBM), 0, 255});
  for (int i = 0; i < kMR; ++i) wheel.push_back({255, 0, static_cast<std::uint8_t>(255 - ramp(i, kMR))});
  return wheel;
}

std::array<std::uint8_t, 3> wheel_color(double fu, double fv) {
  const auto& wheel = color_wheel();
  const int ncols = static_cast<int>(wheel.size());
  const double rad = std::min(std::hypot(fu, fv), 1.0);
  const double a = std::atan2(-fv, -fu) / kPi;
  const double fk = (a + 1.0) / 2.0 * (ncols - 1);
  const int k0 = static_cast<int>(std::floor(fk));
  const int k1 = (k0 + 1) % ncols;
  const double f = fk - k0;
  std::array<std::uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double col0 = wheel[k0][c] / 255.0;
    const double col1 = wheel[k1][c] / 255.0;
    const double col = 1.0 - rad * (1.0 - ((1.0 - f) * col0 + f * col1));
    out[c] = static_cast<std::uint8_t>(std::floor(255.0 * col));
  }
  return out;
}

}  // namespace

SphereMotionField flow_to_sphere_motion(const FlowField& f) {
  require_equirect(f.width(), f.height());
  SphereMotionField m{f.width(), f.height(), {}};
  m.motion.resize(f.size());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      const Vec3 a = lift_pixel(x, y, f.width(), f.height());
      const Vec3 b = lift_pixel(x + static_cast<double>(f.u(x, y)),
                                y + static_cast<double>(f.v(x, y)), f.width(), f.height());
      m.motion[static_cast<std::size_t>(y) * f.width() + x] = b - a;
    }
  }
  return m;
}

const std::vector<std::array<std::uint8_t, 3>>& color_wheel() {
  static const auto wheel = make_wheel();
  return wheel;
}

std::array<std::uint8_t, 3> flow_color(double u, double v, double clip) {
  if (!(clip > 0.0)) throw ArgumentError("flow colour clip must be positive");
  if (!std::isfinite(u) || !std::isfinite(v)) return {0, 0, 0};
  return wheel_color(u / clip, v / clip);
}

Raster8 encode_flow_rgb(const FlowField& f, double clip) {
  if (!(clip > 0.0)) throw ArgumentError("flow colour clip must be positive");
  Raster8 out(f.width(), f.height(), 3);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      const auto c = flow_color(f.u(x, y), f.v(x, y), clip);
      for (int k = 0; k < 3; ++k) out.at(x, y, k) = c[k];
    }
  }
  return out;
}

SphereRgba encode_sphere_rgba(const SphereMotionField& m) {
  SphereRgba out;
  out.image = Raster8(m.width, m.height, 4);
  for (const Vec3& v : m.motion) {
    out.max_xy = std::max(out.max_xy, std::hypot(v.x, v.y));
    out.max_z = std::max(out.max_z, std::abs(v.z));
  }
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      const Vec3& v = m.at(x, y);
      const auto rgb = out.max_xy > 0.0 ? wheel_color(v.x / out.max_xy, v.y / out.max_xy)
                                        : std::array<std::uint8_t, 3>{255, 255, 255};
      for (int k = 0; k < 3; ++k) out.image.at(x, y, k) = rgb[k];
      const double zn = out.max_z > 0.0 ? v.z / out.max_z : 0.0;
      out.image.at(x, y, 3) =
          static_cast<std::uint8_t>(std::lround(std::clamp((zn + 1.0) * 127.5, 0.0, 255.0)));
    }
  }
  return out;
}

}  // namespace omniflow
