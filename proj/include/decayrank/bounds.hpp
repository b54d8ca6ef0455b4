#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decayrank/analytics.hpp"

namespace decayrank {

struct BoundQuery {
  double alpha = 0.0;
  std::vector<double> q;
  double epsilon = 0.0;
  Horizon t;  // infinite by default
};

struct ItemBound {
  double q = 0.0;
  double bound_unclamped = 0.0;  // scale (q - q^2) / eps^2
  double bound = 0.0;            // clamped to [0, 1]
  double sqrt_bound_unclamped = 0.0;  // eps = sqrt(1 - alpha): (1 - alpha^(2t)) (q - q^2) / (1 + alpha)
  double sqrt_bound = 0.0;
  double interval_low = 0.0;     // q - eps
  double interval_high = 0.0;    // q + eps
};

struct BoundReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  Horizon t;
  double sqrt_epsilon = 0.0;  // sqrt(1 - alpha)
  std::vector<ItemBound> items;
  double vector_bound_unclamped = 0.0;  // scale (1 - sum q^2) / eps^2
  double vector_bound = 0.0;
  /// Worst case (q = 1/2) of the sqrt(1 - alpha) bound and whether it is
  /// small enough (<= 0.13) to call the coverage about 7/8.
  double worst_case_sqrt_bound = 0.0;
  bool seven_eighths_coverage = false;
  /// Smallest q with P(|y - q| >= eps q) <= eps; present when eps < 1.
  std::optional<double> relative_error_threshold;
};

BoundReport tail_bound(const BoundQuery& query);

/// 1 / (1 + (1 + alpha)/(1 - alpha) eps^3). alpha may be 0; eps in (0, 1).
double relative_error_threshold(double alpha, double epsilon);

struct RegimeSwitchSpec {
  std::vector<double> x;   // estimate at the start of the window
  std::vector<double> p1;  // incoming distribution for the first t1 events
  std::vector<double> p2;  // incoming distribution for the last t2 events
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
  double alpha = 0.0;
};

struct RegimeSwitchMean {
  std::vector<double> mean;
  double weight_x = 0.0;   // alpha^(t1 + t2)
  double weight_p1 = 0.0;  // alpha^t2 (1 - alpha^t1)
  double weight_p2 = 0.0;  // 1 - alpha^t2
};

RegimeSwitchMean regime_switch_mean(const RegimeSwitchSpec& spec);

struct BoostRatio {
  double alpha = 0.0;
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
  double exact = 0.0;        // (1 - alpha^t2) / (alpha^t2 (1 - alpha^t1))
  double approximate = 0.0;  // alpha^-t2 t2 / t1
  double counting = 0.0;     // t2 / t1
  double relative_gap = 0.0; // |approximate - exact| / exact
};

BoostRatio boost_ratio(double alpha, std::uint64_t t1, std::uint64_t t2);

}  // namespace decayrank
