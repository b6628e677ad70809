#include "omniflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omniflow/error.hpp"

namespace omniflow {

namespace {

void require_same_shape(const FlowField& pred, const FlowField& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ShapeError("flow shapes differ: " + std::to_string(pred.width()) + "x" +
                     std::to_string(pred.height()) + " vs " + std::to_string(gt.width()) +
                     "x" + std::to_string(gt.height()));
  }
}

void require_mask(const FlowField& gt, const Mask* mask) {
  if (mask != nullptr && mask->size() != gt.size()) {
    throw ShapeError("mask size does not match flow field");
  }
}

void require_density(const FlowField& gt, const DensityMap& d) {
  if (d.width() != gt.width() || d.height() != gt.height()) {
    throw ShapeError("density map shape does not match flow field");
  }
  for (double v : d.values()) {
    if (!(v < 1.0)) throw ArgumentError("density values must be < 1");
  }
}

bool valid_pixel(const FlowField& gt, const Mask* mask, std::size_t i) {
  if (mask != nullptr && (*mask)[i] == 0) return false;
  return std::isfinite(gt.u_plane()[i]) && std::isfinite(gt.v_plane()[i]);
}

// Mean of `per_pixel(i) * weight(i)` over valid pixels, exactly summed.
template <typename PerPixel, typename Weight>
double masked_mean(const FlowField& pred, const FlowField& gt, const Mask* mask,
                   PerPixel per_pixel, Weight weight) {
  require_same_shape(pred, gt);
  require_mask(gt, mask);
  ExactSum sum;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!valid_pixel(gt, mask, i)) continue;
    sum.add(per_pixel(i) * weight(i));
    ++n;
  }
  if (n == 0) throw EmptyInputError("no valid pixels to average");
  return sum.value() / static_cast<double>(n);
}

double pixel_epe(const FlowField& pred, const FlowField& gt, std::size_t i) {
  return endpoint_error(pred.u_plane()[i], pred.v_plane()[i], gt.u_plane()[i], gt.v_plane()[i]);
}

double pixel_ae(const FlowField& pred, const FlowField& gt, std::size_t i) {
  return angular_error(pred.u_plane()[i], pred.v_plane()[i], gt.u_plane()[i], gt.v_plane()[i]);
}

}  // namespace

double endpoint_error(double ue, double ve, double ur, double vr) {
  return std::hypot(ue - ur, ve - vr);
}

double angular_error(double ue, double ve, double ur, double vr) {
  if (ue == ur && ve == vr) return 0.0;
  const double num = ue * ur + ve * vr + 1.0;
  const double den = std::sqrt(ur * ur + vr * vr + 1.0) * std::sqrt(ue * ue + ve * ve + 1.0);
  return std::acos(std::clamp(num / den, -1.0, 1.0));
}

double epe(const FlowField& pred, const FlowField& gt, const Mask* mask) {
  return masked_mean(
      pred, gt, mask, [&](std::size_t i) { return pixel_epe(pred, gt, i); },
      [](std::size_t) { return 1.0; });
}

double ae(const FlowField& pred, const FlowField& gt, const Mask* mask) {
  return masked_mean(
      pred, gt, mask, [&](std::size_t i) { return pixel_ae(pred, gt, i); },
      [](std::size_t) { return 1.0; });
}

double epe_d(const FlowField& pred, const FlowField& gt, const DensityMap& d, const Mask* mask) {
  require_density(gt, d);
  return masked_mean(
      pred, gt, mask, [&](std::size_t i) { return pixel_epe(pred, gt, i); },
      [&](std::size_t i) { return 1.0 / (1.0 - d.values()[i]); });
}

double ae_d(const FlowField& pred, const FlowField& gt, const DensityMap& d, const Mask* mask) {
  require_density(gt, d);
  return masked_mean(
      pred, gt, mask, [&](std::size_t i) { return pixel_ae(pred, gt, i); },
      [&](std::size_t i) { return 1.0 / (1.0 - d.values()[i]); });
}

std::string_view speed_region_label(SpeedRegion r) {
  switch (r) {
    case SpeedRegion::all: return "s>=0";
    case SpeedRegion::below5: return "s<5";
    case SpeedRegion::below10: return "s<10";
    case SpeedRegion::below20: return "s<20";
    case SpeedRegion::atleast20: return "s>=20";
  }
  return "?";
}

bool in_speed_region(SpeedRegion r, double s) {
  switch (r) {
    case SpeedRegion::all: return s >= 0.0;
    case SpeedRegion::below5: return s < 5.0;
    case SpeedRegion::below10: return s < 10.0;
    case SpeedRegion::below20: return s < 20.0;
    case SpeedRegion::atleast20: return s >= 20.0;
  }
  return false;
}

std::vector<double> default_density_edges() { return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

MetricAccumulator::MetricAccumulator(std::vector<double> density_edges)
    : edges_(std::move(density_edges)) {
  if (edges_.size() < 2) throw ArgumentError("density bins need at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) {
      throw ArgumentError("density bin edges must be strictly increasing");
    }
  }
  density_bins_.resize(edges_.size() - 1);
}

void MetricAccumulator::add(const FlowField& pred, const FlowField& gt, const DensityMap* d,
                            const Mask* mask) {
  require_same_shape(pred, gt);
  require_mask(gt, mask);
  if (d != nullptr) require_density(gt, *d);
  const bool first = regions_[0].count == 0;
  if (!first && have_density_ != (d != nullptr)) {
    throw ArgumentError("either every pair or no pair must carry a density map");
  }
  MetricAccumulator local(edges_);
  local.have_density_ = d != nullptr;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!valid_pixel(gt, mask, i)) continue;
    const double e = pixel_epe(pred, gt, i);
    const double a = pixel_ae(pred, gt, i);
    const double s = std::hypot(static_cast<double>(gt.u_plane()[i]),
                                static_cast<double>(gt.v_plane()[i]));
    for (std::size_t k = 0; k < kSpeedRegions.size(); ++k) {
      if (!in_speed_region(kSpeedRegions[k], s)) continue;
      local.regions_[k].count += 1;
      local.regions_[k].epe.add(e);
      local.regions_[k].ae.add(a);
    }
    if (d != nullptr) {
      const double dv = d->values()[i];
      const double w = 1.0 / (1.0 - dv);
      local.epe_d_.add(e * w);
      local.ae_d_.add(a * w);
      local.weighted_count_ += 1;
      const int b = find_bin(edges_, dv);
      if (b >= 0) {
        local.density_bins_[b].count += 1;
        local.density_bins_[b].epe.add(e);
        local.density_bins_[b].ae.add(a);
      }
    }
  }
  if (local.regions_[0].count == 0) return;
  if (first) have_density_ = d != nullptr;
  merge(local);
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  if (other.regions_[0].count == 0) return;
  if (other.edges_ != edges_) throw ArgumentError("cannot merge accumulators with different bins");
  if (regions_[0].count != 0 && other.have_density_ != have_density_) {
    throw ArgumentError("cannot merge weighted with unweighted accumulators");
  }
  have_density_ = other.have_density_;
  for (std::size_t k = 0; k < regions_.size(); ++k) regions_[k].merge(other.regions_[k]);
  for (std::size_t b = 0; b < density_bins_.size(); ++b) density_bins_[b].merge(other.density_bins_[b]);
  epe_d_.merge(other.epe_d_);
  ae_d_.merge(other.ae_d_);
  weighted_count_ += other.weighted_count_;
}

MetricReport MetricAccumulator::report() const {
  const std::size_t n = regions_[0].count;
  if (n == 0) throw EmptyInputError("no valid pixels were accumulated");
  MetricReport r;
  r.valid_pixels = n;
  r.epe = regions_[0].epe.value() / static_cast<double>(n);
  r.ae = regions_[0].ae.value() / static_cast<double>(n);
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    const Sums& s = regions_[k];
    if (s.count == 0) continue;  // empty regions are absent, not zero
    const double c = static_cast<double>(s.count);
    r.speed[k] = ErrorMeans{s.count, s.epe.value() / c, s.ae.value() / c};
  }
  if (have_density_) {
    const double w = static_cast<double>(weighted_count_);
    r.epe_d = epe_d_.value() / w;
    r.ae_d = ae_d_.value() / w;
    for (std::size_t b = 0; b < density_bins_.size(); ++b) {
      DensityBinReport bin{edges_[b], edges_[b + 1], std::nullopt};
      const Sums& s = density_bins_[b];
      if (s.count > 0) {
        const double c = static_cast<double>(s.count);
        bin.stats = ErrorMeans{s.count, s.epe.value() / c, s.ae.value() / c};
      }
      r.density.push_back(bin);
    }
  }
  return r;
}

MetricReport speed_binned(const FlowField& pred, const FlowField& gt, const DensityMap& d,
                          std::span<const double> density_edges) {
  MetricAccumulator acc(density_edges.empty()
                            ? default_density_edges()
                            : std::vector<double>(density_edges.begin(), density_edges.end()));
  acc.add(pred, gt, &d);
  return acc.report();
}

}  // namespace omniflow
