#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "omniflow/histogram.hpp"
#include "omniflow/raster.hpp"

namespace omniflow {

// Frame statistics operate on luma in [0, 255] (see to_gray).

/// 256 unit-wide bins centred on the integer grey levels 0..255.
Histogram make_luminance_histogram();

/// Throws EmptyInputError for an empty corpus.
Histogram luminance_histogram(std::span<const Image> frames);

/// Radially averaged power spectrum of centred square crops and its
/// log-log slope.
struct PowerSpectrum {
  int crop_size = 0;
  int frames = 0;
  std::vector<double> frequency;  // cycles per crop, 1 .. crop_size/2
  std::vector<double> power;      // mean periodogram value of each ring
  double fit_low = 0.0;           // fit band, cycles per crop
  double fit_high = 0.0;
  double slope = 0.0;             // d log10(power) / d log10(frequency)
  double intercept = 0.0;
};

/// 512, or the largest power of two that fits inside min(width, height).
int spectrum_crop_size(int width, int height);

/// Streaming spectrum estimator: each frame is converted to luma, centre
/// cropped, mean subtracted, Hann windowed and transformed; periodograms are
/// summed and the ring average is fitted over [f_max/64, f_max/4].
class SpectrumAccumulator {
 public:
  /// Throws ArgumentError for crop sizes below 16 or not a power of two.
  explicit SpectrumAccumulator(int crop_size);

  /// Throws ShapeError if the frame is smaller than the crop.
  void add(const Image& frame);
  void merge(const SpectrumAccumulator& other);

  int crop_size() const { return n_; }
  int frames() const { return frames_; }

  /// Throws EmptyInputError if no frame was added.
  PowerSpectrum result() const;

 private:
  int n_;
  int frames_ = 0;
  std::vector<double> sum_;  // n*n periodogram sum
};

/// Crop size chosen from the smallest frame of the corpus.
PowerSpectrum power_spectrum_slope(std::span<const Image> frames);

/// Least-squares line through (x, y); returns {slope, intercept}.
std::array<double, 2> fit_line(std::span<const double> x, std::span<const double> y);

enum class DerivativeAxis { spatial_x, spatial_y, temporal };

struct DerivativeStats {
  Histogram histogram;
  Moments moments;
  /// Empty (degenerate) when every derivative is identical, e.g. constant frames.
  std::optional<double> kurtosis() const { return moments.kurtosis(); }
  void merge(const DerivativeStats& other) {
    histogram.merge(other.histogram);
    moments.merge(other.moments);
  }
};

/// Histogram over [-255.5, 255.5) with unit bins centred on integers.
DerivativeStats make_frame_derivative_stats();

/// Forward differences of luma. Horizontal differences wrap around the
/// equirectangular seam; temporal differences pair consecutive frames and
/// need at least two (EmptyInputError otherwise).
DerivativeStats derivative_kurtosis(std::span<const Image> frames, DerivativeAxis axis);

/// Adds one frame's spatial derivatives, or a temporal pair, to `stats`.
void accumulate_spatial_derivatives(const Image& gray, DerivativeAxis axis, DerivativeStats& stats);
void accumulate_temporal_derivatives(const Image& gray_prev, const Image& gray_next,
                                     DerivativeStats& stats);

/// Flow-field distributions.
struct FlowStats {
  Histogram u;          // horizontal component
  Histogram speed;      // [0, 1e-3) then log-spaced up to 1e3
  Histogram direction;  // atan2(v, u) over (-pi, pi]; pixels with speed < 1e-6 excluded
  DerivativeStats du;   // forward differences of u along both axes
  DerivativeStats dv;
  std::uint64_t undefined_direction = 0;
  std::uint64_t invalid = 0;  // non-finite vectors

  void merge(const FlowStats& other);
};

FlowStats make_flow_stats();
void accumulate_flow_statistics(const FlowField& f, FlowStats& stats);

/// Throws EmptyInputError for an empty corpus.
FlowStats flow_statistics(std::span<const FlowField> flows);

}  // namespace omniflow
