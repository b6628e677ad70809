#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "omniflow/distortion.hpp"
#include "omniflow/exact_sum.hpp"
#include "omniflow/raster.hpp"

namespace omniflow {

/// Per-pixel Euclidean distance between predicted and reference vectors.
double endpoint_error(double ue, double ve, double ur, double vr);

/// Per-pixel angle between (ue, ve, 1) and (ur, vr, 1), in [0, pi].
double angular_error(double ue, double ve, double ur, double vr);

// Mean errors over the valid pixels. A pixel is valid when the optional mask
// is nonzero there and both ground-truth components are finite. Shape
// mismatch throws ShapeError; no valid pixel throws EmptyInputError.
double epe(const FlowField& pred, const FlowField& gt, const Mask* mask = nullptr);
double ae(const FlowField& pred, const FlowField& gt, const Mask* mask = nullptr);

// Distortion-weighted means: each per-pixel error is divided by (1 - d).
// Throws ArgumentError if any density value is >= 1.
double epe_d(const FlowField& pred, const FlowField& gt, const DensityMap& d,
             const Mask* mask = nullptr);
double ae_d(const FlowField& pred, const FlowField& gt, const DensityMap& d,
            const Mask* mask = nullptr);

/// Overlapping ground-truth speed regions used in flow benchmarks.
enum class SpeedRegion { all, below5, below10, below20, atleast20 };
inline constexpr std::array<SpeedRegion, 5> kSpeedRegions{
    SpeedRegion::all, SpeedRegion::below5, SpeedRegion::below10, SpeedRegion::below20,
    SpeedRegion::atleast20};

std::string_view speed_region_label(SpeedRegion r);  // "s>=0", "s<5", ...
bool in_speed_region(SpeedRegion r, double speed);

struct ErrorMeans {
  std::size_t count = 0;
  double epe = 0.0;
  double ae = 0.0;
};

struct DensityBinReport {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<ErrorMeans> stats;  // absent when no pixel falls in the bin
};

struct MetricReport {
  std::size_t valid_pixels = 0;
  double epe = 0.0;
  double ae = 0.0;
  std::optional<double> epe_d;  // present when a density map was supplied
  std::optional<double> ae_d;
  std::array<std::optional<ErrorMeans>, kSpeedRegions.size()> speed;  // kSpeedRegions order
  std::vector<DensityBinReport> density;

  const std::optional<ErrorMeans>& region(SpeedRegion r) const {
    return speed[static_cast<std::size_t>(r)];
  }
};

/// Default density bin edges for error-by-distortion reporting.
std::vector<double> default_density_edges();

/// Streaming evaluator over one or more flow pairs. Sums are exact, so the
/// report does not depend on pair order or on how accumulators are merged.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::vector<double> density_edges = default_density_edges());

  /// `d` may be null; then weighted metrics and density bins stay empty.
  void add(const FlowField& pred, const FlowField& gt, const DensityMap* d = nullptr,
           const Mask* mask = nullptr);
  void merge(const MetricAccumulator& other);

  /// Throws EmptyInputError if no valid pixel was seen.
  MetricReport report() const;

  std::size_t valid_pixels() const { return regions_[0].count; }

 private:
  struct Sums {
    std::size_t count = 0;
    ExactSum epe;
    ExactSum ae;
    void merge(const Sums& o) {
      count += o.count;
      epe.merge(o.epe);
      ae.merge(o.ae);
    }
  };

  std::vector<double> edges_;
  std::array<Sums, kSpeedRegions.size()> regions_;
  std::vector<Sums> density_bins_;
  ExactSum epe_d_;
  ExactSum ae_d_;
  std::size_t weighted_count_ = 0;
  bool have_density_ = false;
};

/// One-shot evaluation of a single pair with its density map.
MetricReport speed_binned(const FlowField& pred, const FlowField& gt, const DensityMap& d,
                          std::span<const double> density_edges = {});

}  // namespace omniflow
