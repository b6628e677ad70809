#include "omniflow/dataset_stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "omniflow/error.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace omniflow {

namespace {

constexpr int kMaxCrop = 512;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

std::vector<double> hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / (n - 1));
  return w;
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw EmptyInputError(std::string(what) + ": empty corpus");
}

}  // namespace

Histogram make_luminance_histogram() { return Histogram::linear(-0.5, 255.5, 256); }

Histogram luminance_histogram(std::span<const Image> frames) {
  require_nonempty(frames.size(), "luminance_histogram");
  Histogram h = make_luminance_histogram();
  for (const Image& f : frames) {
    const Image gray = to_gray(f);
    for (float v : gray.samples()) h.add(v);
  }
  return h;
}

int spectrum_crop_size(int width, int height) {
  const int side = std::min(width, height);
  if (side >= kMaxCrop) return kMaxCrop;
  int n = 1;
  while (n * 2 <= side) n *= 2;
  return n;
}

std::array<double, 2> fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("line fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ArgumentError("line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

SpectrumAccumulator::SpectrumAccumulator(int crop_size) : n_(crop_size) {
  if (crop_size < 16 || (crop_size & (crop_size - 1)) != 0) {
    throw ArgumentError("spectrum crop must be a power of two >= 16, got " +
                        std::to_string(crop_size));
  }
  sum_.assign(static_cast<std::size_t>(n_) * (n_ / 2 + 1), 0.0);
}

void SpectrumAccumulator::add(const Image& frame) {
  if (frame.width() < n_ || frame.height() < n_) {
    throw ShapeError("frame " + std::to_string(frame.width()) + "x" +
                     std::to_string(frame.height()) + " is smaller than the spectrum crop " +
                     std::to_string(n_));
  }
  const Image gray = to_gray(frame);
  const int x0 = (gray.width() - n_) / 2;
  const int y0 = (gray.height() - n_) / 2;
  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  const int half = n_ / 2 + 1;

  double mean = 0.0;
  for (int y = 0; y < n_; ++y)
    for (int x = 0; x < n_; ++x) mean += gray.at(x0 + x, y0 + y);
  mean /= static_cast<double>(nn);

  const std::vector<double> w = hann(n_);
  double window_energy = 0.0;
  auto in = fftw_buffer<double>(nn);
  auto out = fftw_buffer<fftw_complex>(static_cast<std::size_t>(n_) * half);
  for (int y = 0; y < n_; ++y) {
    for (int x = 0; x < n_; ++x) {
      const double wxy = w[x] * w[y];
      window_energy += wxy * wxy;
      in[static_cast<std::size_t>(y) * n_ + x] = (gray.at(x0 + x, y0 + y) - mean) * wxy;
    }
  }
  fftw_plan plan = fftw_plan_dft_r2c_2d(n_, n_, in.get(), out.get(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    sum_[i] += (out[i][0] * out[i][0] + out[i][1] * out[i][1]) / window_energy;
  }
  ++frames_;
}

void SpectrumAccumulator::merge(const SpectrumAccumulator& other) {
  if (other.n_ != n_) throw ArgumentError("cannot merge spectra of different crop sizes");
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
  frames_ += other.frames_;
}

PowerSpectrum SpectrumAccumulator::result() const {
  if (frames_ == 0) throw EmptyInputError("power spectrum: no frames");
  const int half = n_ / 2 + 1;
  const int f_max = n_ / 2;
  std::vector<double> ring_sum(f_max + 1, 0.0);
  std::vector<double> ring_weight(f_max + 1, 0.0);
  for (int ky = 0; ky < n_; ++ky) {
    const int fy = ky <= n_ / 2 ? ky : ky - n_;
    for (int kx = 0; kx < half; ++kx) {
      const int ring = static_cast<int>(std::lround(std::sqrt(double(kx) * kx + double(fy) * fy)));
      if (ring < 1 || ring > f_max) continue;
      // Columns 1..n/2-1 stand for themselves and their conjugate mirror.
      const double weight = (kx == 0 || kx == n_ / 2) ? 1.0 : 2.0;
      ring_sum[ring] += weight * sum_[static_cast<std::size_t>(ky) * half + kx];
      ring_weight[ring] += weight;
    }
  }
  PowerSpectrum ps;
  ps.crop_size = n_;
  ps.frames = frames_;
  ps.fit_low = f_max / 64.0;
  ps.fit_high = f_max / 4.0;
  std::vector<double> lx, ly;
  for (int r = 1; r <= f_max; ++r) {
    const double p = ring_sum[r] / ring_weight[r] / frames_;
    ps.frequency.push_back(r);
    ps.power.push_back(p);
    if (r >= ps.fit_low && r <= ps.fit_high && p > 0.0) {
      lx.push_back(std::log10(static_cast<double>(r)));
      ly.push_back(std::log10(p));
    }
  }
  const auto [slope, intercept] = fit_line(lx, ly);
  ps.slope = slope;
  ps.intercept = intercept;
  return ps;
}

PowerSpectrum power_spectrum_slope(std::span<const Image> frames) {
  require_nonempty(frames.size(), "power_spectrum_slope");
  int side = frames[0].width();
  for (const Image& f : frames) side = std::min({side, f.width(), f.height()});
  SpectrumAccumulator acc(spectrum_crop_size(side, side));
  for (const Image& f : frames) acc.add(f);
  return acc.result();
}

DerivativeStats make_frame_derivative_stats() {
  return {Histogram::linear(-255.5, 255.5, 511), Moments{}};
}

void accumulate_spatial_derivatives(const Image& gray, DerivativeAxis axis, DerivativeStats& stats) {
  const int w = gray.width(), h = gray.height();
  if (axis == DerivativeAxis::spatial_x) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = static_cast<double>(gray.at((x + 1) % w, y)) - gray.at(x, y);
        stats.histogram.add(d);
        stats.moments.add(d);
      }
    }
  } else if (axis == DerivativeAxis::spatial_y) {
    for (int y = 0; y + 1 < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = static_cast<double>(gray.at(x, y + 1)) - gray.at(x, y);
        stats.histogram.add(d);
        stats.moments.add(d);
      }
    }
  } else {
    throw ArgumentError("temporal derivatives need a frame pair");
  }
}

void accumulate_temporal_derivatives(const Image& prev, const Image& next, DerivativeStats& stats) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw ShapeError("consecutive frames must share dimensions");
  }
  const auto a = prev.samples();
  const auto b = next.samples();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(b[i]) - a[i];
    stats.histogram.add(d);
    stats.moments.add(d);
  }
}

DerivativeStats derivative_kurtosis(std::span<const Image> frames, DerivativeAxis axis) {
  require_nonempty(frames.size(), "derivative_kurtosis");
  DerivativeStats stats = make_frame_derivative_stats();
  if (axis == DerivativeAxis::temporal) {
    if (frames.size() < 2) throw EmptyInputError("temporal derivatives need at least two frames");
    Image prev = to_gray(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
      Image next = to_gray(frames[i]);
      accumulate_temporal_derivatives(prev, next, stats);
      prev = std::move(next);
    }
  } else {
    for (const Image& f : frames) accumulate_spatial_derivatives(to_gray(f), axis, stats);
  }
  return stats;
}

FlowStats make_flow_stats() {
  FlowStats s{Histogram::linear(-64.0, 64.0, 256),
              Histogram::log_spaced_with_zero(1e-3, 1e3, 60),
              Histogram::linear(-kPi, kPi, 72),
              {Histogram::linear(-16.0, 16.0, 256), Moments{}},
              {Histogram::linear(-16.0, 16.0, 256), Moments{}},
              0,
              0};
  return s;
}

void FlowStats::merge(const FlowStats& o) {
  u.merge(o.u);
  speed.merge(o.speed);
  direction.merge(o.direction);
  du.merge(o.du);
  dv.merge(o.dv);
  undefined_direction += o.undefined_direction;
  invalid += o.invalid;
}

void accumulate_flow_statistics(const FlowField& f, FlowStats& stats) {
  const int w = f.width(), h = f.height();
  auto finite = [&](int x, int y) { return std::isfinite(f.u(x, y)) && std::isfinite(f.v(x, y)); };
  auto add_diff = [](DerivativeStats& s, double d) {
    s.histogram.add(d);
    s.moments.add(d);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!finite(x, y)) {
        ++stats.invalid;
        continue;
      }
      const double u = f.u(x, y), v = f.v(x, y);
      const double s = std::hypot(u, v);
      stats.u.add(u);
      stats.speed.add(s);
      if (s < 1e-6) {
        ++stats.undefined_direction;
      } else {
        stats.direction.add(std::atan2(v, u));
      }
      const int xr = (x + 1) % w;
      if (finite(xr, y)) {
        add_diff(stats.du, static_cast<double>(f.u(xr, y)) - u);
        add_diff(stats.dv, static_cast<double>(f.v(xr, y)) - v);
      }
      if (y + 1 < h && finite(x, y + 1)) {
        add_diff(stats.du, static_cast<double>(f.u(x, y + 1)) - u);
        add_diff(stats.dv, static_cast<double>(f.v(x, y + 1)) - v);
      }
    }
  }
}

FlowStats flow_statistics(std::span<const FlowField> flows) {
  require_nonempty(flows.size(), "flow_statistics");
  FlowStats stats = make_flow_stats();
  for (const FlowField& f : flows) accumulate_flow_statistics(f, stats);
  return stats;
}

}  // namespace omniflow
