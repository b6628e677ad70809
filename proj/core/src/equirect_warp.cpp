#include "omniflow/equirect_warp.hpp"

#include <algorithm>
#include <cmath>

#include "omniflow/error.hpp"

namespace omniflow {

namespace {

int wrap_index(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

int clamp_row(int i, int n) { return std::clamp(i, 0, n - 1); }

void require_same_shape(int w0, int h0, int w1, int h1, const char* what) {
  if (w0 != w1 || h0 != h1) {
    throw ShapeError(std::string(what) + ": dimensions " + std::to_string(w0) + "x" +
                     std::to_string(h0) + " do not match warp map " + std::to_string(w1) +
                     "x" + std::to_string(h1));
  }
}

}  // namespace

double wrap_horizontal(double du, int width) {
  const double w = static_cast<double>(width);
  const double half = 0.5 * w;
  if (du > -half && du <= half) return du;
  double r = std::fmod(du + half, w);
  if (r <= 0.0) r += w;
  return r - half;
}

PixelCoord warp_source(const Rotation3& r, double col, double row, int width, int height) {
  // Rotation matrices are orthonormal, so r^-1 * s == r^T * s.
  const Mat3& m = r.matrix();
  const Vec3 s = lift_pixel(col, row, width, height);
  const Vec3 q{m[0][0] * s.x + m[1][0] * s.y + m[2][0] * s.z,
               m[0][1] * s.x + m[1][1] * s.y + m[2][1] * s.z,
               m[0][2] * s.x + m[1][2] * s.y + m[2][2] * s.z};
  return project_to_pixel(q, width, height);
}

WarpMap build_warp_map(const Rotation3& r, int width, int height) {
  require_equirect(width, height);
  WarpMap w;
  w.width_ = width;
  w.height_ = height;
  w.rotation_ = r;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  w.col_.resize(n);
  w.row_.resize(n);
  const bool identity = r.is_identity();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = w.index(x, y);
      if (identity) {
        w.col_[i] = x;
        w.row_[i] = y;
      } else {
        const PixelCoord src = warp_source(r, x, y, width, height);
        w.col_[i] = src.col;
        w.row_[i] = src.row;
      }
    }
  }
  return w;
}

WarpMap inverse_warp(const WarpMap& w) {
  return build_warp_map(w.rotation().inverse(), w.width(), w.height());
}

float sample(ImageView img, double col, double row, int c, Interp interp) {
  if (interp == Interp::nearest) {
    const int x = wrap_index(static_cast<int>(std::lround(std::floor(col + 0.5))), img.width);
    const int y = clamp_row(static_cast<int>(std::lround(std::floor(row + 0.5))), img.height);
    return img.at(x, y, c);
  }
  const double fx0 = std::floor(col);
  const double fy0 = std::floor(row);
  const double tx = col - fx0;
  const double ty = row - fy0;
  const int x0 = wrap_index(static_cast<int>(fx0), img.width);
  const int x1 = wrap_index(x0 + 1, img.width);
  const int y0 = clamp_row(static_cast<int>(fy0), img.height);
  const int y1 = clamp_row(static_cast<int>(fy0) + 1, img.height);
  // a + t*(b - a) reproduces constant neighbourhoods exactly.
  auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
  const double top = lerp(img.at(x0, y0, c), img.at(x1, y0, c), tx);
  const double bottom = lerp(img.at(x0, y1, c), img.at(x1, y1, c), tx);
  return static_cast<float>(lerp(top, bottom, ty));
}

std::array<float, 2> sample_flow(const FlowField& f, double col, double row, Interp interp) {
  const ImageView u{f.u_plane(), f.width(), f.height(), 1};
  const ImageView v{f.v_plane(), f.width(), f.height(), 1};
  return {sample(u, col, row, 0, interp), sample(v, col, row, 0, interp)};
}

void warp_image_into(ImageView in, const WarpMap& w, Interp interp, MutableImageView out) {
  require_same_shape(in.width, in.height, w.width(), w.height(), "warp_image input");
  require_same_shape(out.width, out.height, w.width(), w.height(), "warp_image output");
  if (in.channels != out.channels) throw ShapeError("warp_image: channel count mismatch");
  if (in.samples.data() == out.samples.data()) {
    throw ArgumentError("warp_image: output must not alias input");
  }
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      const double sc = w.src_col(x, y);
      const double sr = w.src_row(x, y);
      for (int c = 0; c < in.channels; ++c) out.at(x, y, c) = sample(in, sc, sr, c, interp);
    }
  }
}

Image warp_image(const Image& img, const WarpMap& w, Interp interp) {
  require_same_shape(img.width(), img.height(), w.width(), w.height(), "warp_image");
  Image out(img.width(), img.height(), img.channels());
  warp_image_into(img.view(), w, interp, out.view());
  return out;
}

FlowField warp_flow(const FlowField& f, const WarpMap& w, const Rotation3& r, Interp interp) {
  require_same_shape(f.width(), f.height(), w.width(), w.height(), "warp_flow");
  const int width = f.width();
  const int height = f.height();
  const bool identity = r.is_identity() && w.rotation().is_identity();
  FlowField out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double qc = w.src_col(x, y);
      const double qr = w.src_row(x, y);
      const auto [fu, fv] = sample_flow(f, qc, qr, interp);
      if (identity) {
        out.u(x, y) = static_cast<float>(wrap_horizontal(fu, width));
        out.v(x, y) = fv;
        continue;
      }
      const Vec3 a = r.apply(lift_pixel(qc, qr, width, height));
      const Vec3 b = r.apply(lift_pixel(qc + fu, qr + fv, width, height));
      const PixelCoord pa = project_to_pixel(a, width, height);
      const PixelCoord pb = project_to_pixel(b, width, height);
      out.u(x, y) = static_cast<float>(wrap_horizontal(pb.col - pa.col, width));
      out.v(x, y) = static_cast<float>(pb.row - pa.row);
    }
  }
  return out;
}

}  // namespace omniflow
