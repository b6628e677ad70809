#pragma once

#include <vector>

namespace omniflow {

/// Exactly-rounded floating-point accumulator (Shewchuk non-overlapping
/// partials, the algorithm behind Python's math.fsum).
///
/// The represented sum is exact, so value() does not depend on the order in
/// which terms were added or accumulators merged.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  /// Correctly rounded value of the exact sum.
  double value() const;

 private:
  std::vector<double> partials_;
  double special_ = 0.0;  // sum of non-finite terms
  bool has_special_ = false;
};

}  // namespace omniflow
