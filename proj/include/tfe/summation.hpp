#ifndef TFE_SUMMATION_HPP
#define TFE_SUMMATION_HPP

#include <cmath>

namespace tfe {

/// Neumaier's variant of Kahan summation.
///
/// The running compensation captures the low-order bits lost by each
/// addition, including the case where the addend is larger in magnitude
/// than the partial sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  CompensatedSum& add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(double x) { return add(x); }

  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace tfe

#endif  // TFE_SUMMATION_HPP
