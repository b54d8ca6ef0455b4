#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace decayrank::detail {

// Neumaier's variant of Kahan summation.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum<double> s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Probability vector check shared by every module: entries finite, >= 0,
// summing to 1 within `tol`.
inline bool is_probability_vector(std::span<const double> q, double tol) {
  if (q.empty()) return false;
  for (double x : q) {
    if (!std::isfinite(x) || x < 0.0) return false;
  }
  return std::fabs(compensated_sum(q) - 1.0) <= tol;
}

inline bool in_open_unit_interval(double x) { return std::isfinite(x) && x > 0.0 && x < 1.0; }

// 1 - alpha^n computed without cancellation for alpha near 1.
inline double one_minus_pow(double alpha, double n) {
  return -std::expm1(n * std::log(alpha));
}

}  // namespace decayrank::detail
