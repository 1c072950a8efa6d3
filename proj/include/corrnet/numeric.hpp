#pragma once

#include <cmath>

namespace corrnet {

/// Neumaier-compensated running sum. Order of `add` calls fixes the result,
/// so identical inputs give bit-identical totals.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class Range>
double compensated_sum(const Range& values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

}  // namespace corrnet
