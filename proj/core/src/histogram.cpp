#include "omniflow/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "omniflow/error.hpp"

namespace omniflow {

Histogram::Histogram(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw ArgumentError("histogram needs at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) {
      throw ArgumentError("histogram edges must be strictly increasing");
    }
  }
  counts_.assign(edges_.size() - 1, 0);
}

Histogram Histogram::linear(double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ArgumentError("invalid linear histogram range");
  std::vector<double> e(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
  return Histogram(std::move(e));
}

Histogram Histogram::log_spaced_with_zero(double lo, double hi, int bins) {
  if (bins < 1 || !(lo > 0.0) || !(hi > lo)) throw ArgumentError("invalid log histogram range");
  std::vector<double> e{0.0};
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  for (int i = 0; i <= bins; ++i) e.push_back(std::pow(10.0, l0 + (l1 - l0) * i / bins));
  return Histogram(std::move(e));
}

int Histogram::bin_of(double value) const {
  if (std::isnan(value)) return -1;
  if (value < edges_.front()) return 0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
  const int b = static_cast<int>(it - edges_.begin()) - 1;
  return std::min(b, static_cast<int>(counts_.size()) - 1);
}

void Histogram::add(double value, std::uint64_t weight) {
  const int b = bin_of(value);
  if (b < 0) {
    invalid_ += weight;
    return;
  }
  counts_[b] += weight;
  total_ += weight;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges_ != edges_) throw ArgumentError("cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  invalid_ += other.invalid_;
}

int Histogram::mode_bin() const {
  return static_cast<int>(std::max_element(counts_.begin(), counts_.end()) - counts_.begin());
}

std::vector<double> Histogram::normalized() const {
  std::vector<double> out(counts_.size(), 0.0);
  if (total_ == 0) return out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
  }
  return out;
}

void Moments::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void Moments::merge(const Moments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta, d3 = d2 * delta, d4 = d2 * d2;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * o.m3_ - nb * m3_) / n;
  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

double Moments::variance() const { return n_ == 0 ? 0.0 : m2_ / static_cast<double>(n_); }

std::optional<double> Moments::kurtosis() const {
  if (n_ < 2 || m2_ <= 0.0) return std::nullopt;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_);
}

}  // namespace omniflow
