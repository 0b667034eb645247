#pragma once

#include <complex>

namespace regconv {

/// Kahan-compensated accumulator. Subrectangular sums of conditionally
/// convergent series cancel heavily; the compensation keeps running sums
/// within a few ulps of the exact value.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class KahanComplexSum {
 public:
  void add(const std::complex<double>& v) {
    re_.add(v.real());
    im_.add(v.imag());
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_;
  KahanSum im_;
};

}  // namespace regconv
