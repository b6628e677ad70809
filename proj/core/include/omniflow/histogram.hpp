#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace omniflow {

/// Fixed-edge histogram. Finite values beyond the outer edges land in the
/// first/last bin; NaN is counted separately as invalid. Merging histograms
/// with identical edges is exact, associative and commutative.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::vector<double> edges);

  static Histogram linear(double lo, double hi, int bins);
  /// First bin is [0, lo); the rest are log-spaced between lo and hi.
  static Histogram log_spaced_with_zero(double lo, double hi, int bins);

  void add(double value, std::uint64_t weight = 1);
  void merge(const Histogram& other);

  int bin_of(double value) const;
  int mode_bin() const;

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t invalid() const { return invalid_; }
  std::size_t bins() const { return counts_.size(); }

  /// Counts divided by total(); all zeros for an empty histogram.
  std::vector<double> normalized() const;

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t invalid_ = 0;
};

/// Running central moments up to fourth order with pairwise merging.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // population variance
  /// Non-excess kurtosis m4 / m2^2 (3 for a Gaussian). Empty when the
  /// variance is zero or fewer than two samples were seen.
  std::optional<double> kurtosis() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace omniflow
