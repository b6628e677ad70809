#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "omniflow/error.hpp"

namespace omniflow::cli {

namespace {

constexpr int kMargin = 24;

void put(Raster8& r, int x, int y, std::uint8_t red, std::uint8_t green, std::uint8_t blue) {
  if (x < 0 || y < 0 || x >= r.width || y >= r.height) return;
  r.at(x, y, 0) = red;
  r.at(x, y, 1) = green;
  r.at(x, y, 2) = blue;
}

void line(Raster8& r, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    put(r, x0, y0, 31, 87, 180);
    put(r, x0, y0 + 1, 31, 87, 180);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Raster8 line_plot(std::span<const double> x, std::span<const double> y, const PlotOptions& o) {
  if (x.size() != y.size()) throw ArgumentError("line_plot: x and y differ in length");
  if (o.width <= 2 * kMargin || o.height <= 2 * kMargin) throw ArgumentError("line_plot: canvas too small");
  Raster8 r(o.width, o.height, 3);
  std::fill(r.samples.begin(), r.samples.end(), std::uint8_t{255});

  std::vector<std::array<double, 2>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double px = x[i], py = y[i];
    if (o.log_x) px = px > 0 ? std::log10(px) : NAN;
    if (o.log_y) py = py > 0 ? std::log10(py) : NAN;
    if (std::isfinite(px) && std::isfinite(py)) pts.push_back({px, py});
  }

  const int x0 = kMargin, x1 = o.width - kMargin, y0 = kMargin, y1 = o.height - kMargin;
  for (int i = x0; i <= x1; ++i) {
    put(r, i, y0, 0, 0, 0);
    put(r, i, y1, 0, 0, 0);
  }
  for (int j = y0; j <= y1; ++j) {
    put(r, x0, j, 0, 0, 0);
    put(r, x1, j, 0, 0, 0);
  }
  if (pts.empty()) return r;

  double lx = std::numeric_limits<double>::infinity(), hx = -lx, ly = lx, hy = -lx;
  for (const auto& p : pts) {
    lx = std::min(lx, p[0]);
    hx = std::max(hx, p[0]);
    ly = std::min(ly, p[1]);
    hy = std::max(hy, p[1]);
  }
  if (hx == lx) hx = lx + 1;
  if (hy == ly) hy = ly + 1;
  auto to_px = [&](const std::array<double, 2>& p) {
    const double u = (p[0] - lx) / (hx - lx), v = (p[1] - ly) / (hy - ly);
    return std::array<int, 2>{x0 + 2 + static_cast<int>(std::lround(u * (x1 - x0 - 4))),
                              y1 - 2 - static_cast<int>(std::lround(v * (y1 - y0 - 4)))};
  };
  auto prev = to_px(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto cur = to_px(pts[i]);
    line(r, prev[0], prev[1], cur[0], cur[1]);
    prev = cur;
  }
  if (pts.size() == 1) line(r, prev[0], prev[1], prev[0], prev[1]);
  return r;
}

}  // namespace omniflow::cli
