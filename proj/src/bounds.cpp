#include "decayrank/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decayrank/error.hpp"
#include "numeric.hpp"

namespace decayrank {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require_distribution(const std::vector<double>& v, const char* name) {
  if (!detail::is_probability_vector(v, 1e-12)) {
    throw ParameterError(std::string(name) + " must be a probability vector");
  }
}

}  // namespace

BoundReport tail_bound(const BoundQuery& query) {
  if (!detail::in_open_unit_interval(query.alpha)) throw ParameterError("alpha must lie in (0, 1)");
  if (!std::isfinite(query.epsilon) || query.epsilon <= 0.0) throw ParameterError("epsilon must be positive");
  if (query.q.empty()) throw ParameterError("q is empty");
  for (double x : query.q) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw ParameterError("every q_i must lie in [0, 1]");
  }

  const double alpha = query.alpha;
  const double eps2 = query.epsilon * query.epsilon;
  const double scale = covariance_scale(alpha, query.t);
  const double horizon = horizon_factor(alpha, query.t);

  BoundReport r;
  r.alpha = alpha;
  r.epsilon = query.epsilon;
  r.t = query.t;
  r.sqrt_epsilon = std::sqrt(1.0 - alpha);

  detail::CompensatedSum<double> sum_sq;
  for (double q : query.q) {
    ItemBound b;
    b.q = q;
    b.bound_unclamped = scale * (q - q * q) / eps2;
    b.bound = clamp01(b.bound_unclamped);
    b.sqrt_bound_unclamped = horizon * (q - q * q) / (1.0 + alpha);
    b.sqrt_bound = clamp01(b.sqrt_bound_unclamped);
    b.interval_low = q - query.epsilon;
    b.interval_high = q + query.epsilon;
    r.items.push_back(b);
    sum_sq.add(q * q);
  }
  r.vector_bound_unclamped = scale * (1.0 - sum_sq.value()) / eps2;
  r.vector_bound = clamp01(r.vector_bound_unclamped);
  r.worst_case_sqrt_bound = horizon * 0.25 / (1.0 + alpha);
  r.seven_eighths_coverage = r.worst_case_sqrt_bound <= 0.13;
  if (query.epsilon < 1.0) r.relative_error_threshold = relative_error_threshold(alpha, query.epsilon);
  return r;
}

double relative_error_threshold(double alpha, double epsilon) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha >= 1.0) throw ParameterError("alpha must lie in [0, 1)");
  if (!detail::in_open_unit_interval(epsilon)) throw ParameterError("epsilon must lie in (0, 1)");
  return 1.0 / (1.0 + (1.0 + alpha) / (1.0 - alpha) * epsilon * epsilon * epsilon);
}

RegimeSwitchMean regime_switch_mean(const RegimeSwitchSpec& spec) {
  if (!detail::in_open_unit_interval(spec.alpha)) throw ParameterError("alpha must lie in (0, 1)");
  require_distribution(spec.x, "X");
  require_distribution(spec.p1, "P1");
  require_distribution(spec.p2, "P2");
  if (spec.p1.size() != spec.x.size() || spec.p2.size() != spec.x.size()) {
    throw ParameterError("X, P1 and P2 must have the same length");
  }
  const double a = spec.alpha;
  RegimeSwitchMean r;
  const double a_t2 = std::pow(a, static_cast<double>(spec.t2));
  r.weight_x = std::pow(a, static_cast<double>(spec.t1 + spec.t2));
  r.weight_p1 = a_t2 * detail::one_minus_pow(a, static_cast<double>(spec.t1));
  r.weight_p2 = detail::one_minus_pow(a, static_cast<double>(spec.t2));
  r.mean.resize(spec.x.size());
  for (std::size_t i = 0; i < spec.x.size(); ++i) {
    r.mean[i] = r.weight_x * spec.x[i] + r.weight_p1 * spec.p1[i] + r.weight_p2 * spec.p2[i];
  }
  return r;
}

BoostRatio boost_ratio(double alpha, std::uint64_t t1, std::uint64_t t2) {
  if (!detail::in_open_unit_interval(alpha)) throw ParameterError("alpha must lie in (0, 1)");
  if (t1 == 0 || t2 == 0) throw ParameterError("t1 and t2 must be at least 1");
  const double d1 = static_cast<double>(t1), d2 = static_cast<double>(t2);
  const double log_alpha = std::log(alpha);
  BoostRatio b;
  b.alpha = alpha;
  b.t1 = t1;
  b.t2 = t2;
  // alpha^-t2 (1 - alpha^t2) / (1 - alpha^t1), with both complements via expm1.
  b.exact = std::exp(-d2 * log_alpha) * detail::one_minus_pow(alpha, d2) / detail::one_minus_pow(alpha, d1);
  b.approximate = std::exp(-d2 * log_alpha) * d2 / d1;
  b.counting = d2 / d1;
  b.relative_gap = std::fabs(b.approximate - b.exact) / b.exact;
  return b;
}

}  // namespace decayrank
