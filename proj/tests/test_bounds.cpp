#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "decayrank/bounds.hpp"
#include "decayrank/error.hpp"
#include "decayrank/walk_sim.hpp"

using namespace decayrank;

TEST(Tail, EightySevenPercentExample) {
  const auto r = tail_bound({0.99, {0.5}, 0.1, kInfinite});
  EXPECT_NEAR(r.items[0].bound, 0.25 / 1.99, 1e-15);
  EXPECT_NEAR(r.items[0].bound, 0.1256, 1e-4);
  EXPECT_GE(1.0 - r.items[0].bound, 0.874);
  EXPECT_NEAR(r.sqrt_epsilon, 0.1, 1e-15);
  // Symmetric interval around q.
  EXPECT_NEAR(r.items[0].interval_low, 0.4, 1e-15);
  EXPECT_NEAR(r.items[0].interval_high, 0.6, 1e-15);
  EXPECT_TRUE(r.seven_eighths_coverage);
}

TEST(Tail, DegenerateQHasZeroBound) {
  const auto r = tail_bound({0.7, {0.0, 1.0}, 0.01, 5});
  EXPECT_EQ(r.items[0].bound, 0.0);
  EXPECT_EQ(r.items[1].bound, 0.0);
}

TEST(Tail, ClampedToOne) {
  const auto r = tail_bound({0.1, {0.5}, 0.01, kInfinite});
  EXPECT_GT(r.items[0].bound_unclamped, 1.0);
  EXPECT_EQ(r.items[0].bound, 1.0);
  EXPECT_LE(r.vector_bound, 1.0);
}

TEST(Tail, FiniteHorizonFactor) {
  const auto inf = tail_bound({0.9, {0.3}, 0.05, kInfinite});
  const auto fin = tail_bound({0.9, {0.3}, 0.05, 12});
  EXPECT_NEAR(fin.items[0].bound_unclamped, (1 - std::pow(0.9, 24)) * inf.items[0].bound_unclamped, 1e-14);
}

TEST(Tail, VectorBound) {
  const auto r = tail_bound({0.9, {0.2, 0.3, 0.5}, 0.5, kInfinite});
  EXPECT_NEAR(r.vector_bound_unclamped, 0.1 / 1.9 / 0.25 * (1 - 0.04 - 0.09 - 0.25), 1e-15);
}

TEST(Tail, EnumeratedTailBelowBound) {
  // All 2^12 paths from y0 = q, so E y_t = q.
  const auto cfg = WalkConfig::scalar(0.9, 0.3, 0.3, 12, 1, 0);
  const double tail = exact_tail_probability(cfg, 0, 0.3, 0.05);
  EXPECT_LE(tail, tail_bound({0.9, {0.3}, 0.05, 12}).items[0].bound);
}

TEST(Tail, RejectsBadInput) {
  EXPECT_THROW(tail_bound({0.9, {0.3}, 0.0, kInfinite}), ParameterError);
  EXPECT_THROW(tail_bound({0.9, {1.3}, 0.1, kInfinite}), ParameterError);
  EXPECT_THROW(tail_bound({1.0, {0.3}, 0.1, kInfinite}), ParameterError);
}

TEST(Threshold, Examples) {
  EXPECT_NEAR(relative_error_threshold(0.999, 0.1), 1.0 / 2.999, 1e-15);
  EXPECT_NEAR(relative_error_threshold(0.0, 1.0 - 1e-12), 0.5, 1e-11);
  EXPECT_THROW(relative_error_threshold(0.5, 1.0), ParameterError);
  EXPECT_THROW(relative_error_threshold(1.0, 0.5), ParameterError);
}

TEST(Threshold, HoldsInSimulationAtTheThreshold) {
  // Direct sampling of y <- alpha y + (1 - alpha) B started at q.
  const double alpha = 0.99, eps = 0.2;
  const double q = relative_error_threshold(alpha, eps);
  const auto steps = infinite_horizon_steps(alpha);
  std::mt19937_64 rng(17);
  std::bernoulli_distribution jump(q);
  const int paths = 100000;
  int hits = 0;
  for (int p = 0; p < paths; ++p) {
    double y = q;
    for (std::uint64_t s = 0; s < steps; ++s) y = alpha * y + (1 - alpha) * (jump(rng) ? 1.0 : 0.0);
    hits += std::fabs(y - q) >= eps * q;
  }
  EXPECT_LE(static_cast<double>(hits) / paths, eps);
}

TEST(Regime, ExamplesAndWeights) {
  const RegimeSwitchSpec s{{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, 100, 100, 0.99};
  const auto r = regime_switch_mean(s);
  EXPECT_NEAR(r.weight_x + r.weight_p1 + r.weight_p2, 1.0, 1e-12);
  EXPECT_NEAR(r.mean[0], std::pow(0.99, 200) + 1 - std::pow(0.99, 100), 1e-15);

  const RegimeSwitchSpec no_p1{{0.2, 0.8}, {0.5, 0.5}, {0.9, 0.1}, 0, 30, 0.9};
  const auto a = regime_switch_mean(no_p1);
  EXPECT_NEAR(a.mean[0], std::pow(0.9, 30) * 0.2 + (1 - std::pow(0.9, 30)) * 0.9, 1e-15);
  EXPECT_EQ(a.weight_p1, 0.0);

  const RegimeSwitchSpec same{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}, 5, 9, 0.5};
  const auto b = regime_switch_mean(same);
  EXPECT_NEAR(b.mean[0], 0.3, 1e-15);

  const RegimeSwitchSpec bad{{0.3, 0.7}, {0.3}, {0.3, 0.7}, 5, 9, 0.5};
  EXPECT_THROW(regime_switch_mean(bad), ParameterError);
}

TEST(Boost, ExactAtPointNineNine) {
  const auto b = boost_ratio(0.99, 100, 100);
  EXPECT_NEAR(b.exact, std::pow(0.99, -100.0), 1e-12);
  EXPECT_NEAR(b.approximate, std::pow(0.99, -100.0), 1e-12);
  EXPECT_EQ(b.counting, 1.0);
}

TEST(Boost, GapShrinksAsAlphaApproachesOne) {
  double previous = INFINITY;
  for (double beta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double gap = boost_ratio(1 - beta, 10, 300).relative_gap;
    EXPECT_LT(gap, previous);
    previous = gap;
  }
}

TEST(Boost, RejectsZeroDurations) {
  EXPECT_THROW(boost_ratio(0.9, 0, 3), ParameterError);
  EXPECT_THROW(boost_ratio(0.9, 3, 0), ParameterError);
}

// The exact ratio solves alpha^t2 (1 - alpha^t1) r = 1 - alpha^t2.
TEST(Property, BoostDefinition) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = 0.5 + 0.4999 * unit(rng);
    const std::uint64_t t1 = 1 + rng() % 1000, t2 = 1 + rng() % 1000;
    const auto b = boost_ratio(a, t1, t2);
    const double lhs = std::pow(a, t2) * (1 - std::pow(a, t1)) * b.exact;
    EXPECT_NEAR(lhs, 1 - std::pow(a, t2), 1e-10 * (1 - std::pow(a, t2)));
    EXPECT_NEAR(b.counting, static_cast<double>(t2) / t1, 1e-15 * b.counting);
  }
}
