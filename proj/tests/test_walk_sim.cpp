#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "decayrank/analytics.hpp"
#include "decayrank/error.hpp"
#include "decayrank/walk_sim.hpp"

using namespace decayrank;

TEST(Vertices, SimplexIsTheStandardBasis) {
  const auto v = VertexSet::simplex(3);
  EXPECT_EQ(v.mode(), VertexMode::simplex);
  EXPECT_EQ(v.count(), 3u);
  EXPECT_EQ(v.dimension(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto p = v.point(i);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(p[j], i == j ? 1.0 : 0.0);
  }
}

TEST(Vertices, RootsOfUnityAreStoredAsPlanePoints) {
  const auto v = VertexSet::roots_of_unity(3);
  EXPECT_EQ(v.mode(), VertexMode::complex);
  EXPECT_EQ(v.dimension(), 2u);
  const auto z = v.complex_point(1);
  EXPECT_NEAR(z.real(), -0.5, 1e-15);
  EXPECT_NEAR(z.imag(), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Vertices, ModeNames) {
  EXPECT_EQ(vertex_mode_from_string("simplex"), VertexMode::simplex);
  EXPECT_EQ(vertex_mode_from_string("real"), VertexMode::real_vectors);
  EXPECT_EQ(vertex_mode_from_string("complex"), VertexMode::complex);
  EXPECT_THROW(vertex_mode_from_string("torus"), ParameterError);
}

TEST(Config, ValidationRejectsBadInput) {
  EXPECT_THROW(WalkConfig::scalar(1.0, 0.3, 0.0, 5, 10, 0).validate(), ParameterError);
  EXPECT_THROW(WalkConfig::simplex(0.5, {0.5, 0.6}, {1, 0}, 5, 10, 0).validate(), ParameterError);
  EXPECT_THROW(WalkConfig::simplex(0.5, {0.5, 0.5}, {1, 0, 0}, 5, 10, 0).validate(), ParameterError);
  EXPECT_THROW(WalkConfig::simplex(0.5, {0.5, 0.5}, {0.7, 0.7}, 5, 10, 0).validate(), ParameterError);
  EXPECT_THROW(WalkConfig::scalar(0.5, 0.3, 0.0, 5, 0, 0).validate(), ParameterError);
  EXPECT_NO_THROW(WalkConfig::scalar(0.5, 0.3, 0.0, 5, 1, 0).validate());
}

TEST(Simulate, DegenerateQHasZeroVariance) {
  const auto s = run_walk(WalkConfig::simplex(0.9, {1.0, 0.0}, {0.0, 1.0}, 5, 10, 0));
  const double expected = 1.0 - std::pow(0.9, 5);
  EXPECT_NEAR(s.mean[0], expected, 1e-15);
  for (double c : s.covariance) EXPECT_NEAR(c, 0.0, 1e-30);
}

TEST(Simulate, SameSeedSameBits) {
  auto cfg = WalkConfig::simplex(0.8, {0.2, 0.3, 0.5}, {1, 0, 0}, 50, 20000, 7);
  cfg.moment_order = 4;
  const auto a = run_walk(cfg);
  const auto b = run_walk(cfg);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.covariance, b.covariance);
  EXPECT_EQ(a.central_moments, b.central_moments);
  cfg.seed = 8;
  EXPECT_NE(run_walk(cfg).mean, a.mean);
}

TEST(Simulate, PathsStayOnTheSimplex) {
  const auto s = run_walk(WalkConfig::simplex(0.95, {0.1, 0.2, 0.3, 0.4}, {0.25, 0.25, 0.25, 0.25}, 300, 5000, 1));
  EXPECT_LE(s.max_sum_deviation, 1e-12);
  EXPECT_GE(s.min_coordinate, 0.0);
}

TEST(Simulate, MeanAgreesWithClosedForm) {
  for (double q : {0.1, 0.5, 0.8}) {
    const auto s = run_walk(WalkConfig::scalar(0.7, q, 1.0, 9, 40000, 11));
    const auto c = scalar_mean_var(0.7, q, 9, 1.0);
    EXPECT_LE(std::fabs(s.mean[0] - c.mean), 5.0 * s.mean_standard_error[0]) << q;
    EXPECT_NEAR(s.cov(0, 0), c.variance, 0.05 * c.variance) << q;
  }
}

TEST(Simulate, ComplexWalkStaysInTheDisc) {
  WalkConfig cfg;
  cfg.alpha = 0.9;
  cfg.q = {0.2, 0.3, 0.5};
  cfg.vertices = VertexSet::roots_of_unity(3);
  cfg.y0 = {0.0, 0.0};
  cfg.steps = 40;
  cfg.paths = 3000;
  const auto s = run_walk(cfg);
  EXPECT_LE(s.max_modulus, 1.0 + 1e-12);
  EXPECT_NEAR(s.complex_variance, s.cov(0, 0) + s.cov(1, 1), 1e-12);
}

TEST(Horizon, StepsUntilDecayIsNegligible) {
  EXPECT_EQ(infinite_horizon_steps(0.9), static_cast<std::uint64_t>(std::ceil(std::log(1e-9) / std::log(0.9))));
  bool capped = false;
  EXPECT_EQ(infinite_horizon_steps(1.0 - 1e-9, &capped), 1000000u);
  EXPECT_TRUE(capped);
}

TEST(Enumerate, TwoStepsByHand) {
  // y_2 = 0.25 b1 + 0.5 b2 with b ~ Bernoulli(0.3).
  const auto m = enumerate_exact(WalkConfig::scalar(0.5, 0.3, 0.0, 2, 1, 0), 2);
  EXPECT_EQ(m.sequences, 4u);
  EXPECT_NEAR(m.mean[0], 0.225, 1e-16);
  EXPECT_NEAR(m.cov(0, 0), (1.0 / 16 + 1.0 / 4) * 0.21, 1e-16);
  EXPECT_NEAR(m.probability_mass, 1.0, 1e-15);
  ASSERT_EQ(m.support.size(), 4u);
  EXPECT_NEAR(m.support[0].point[0], 0.75, 1e-16);  // two jumps to vertex 0
  EXPECT_NEAR(m.support[0].probability, 0.09, 1e-16);
}

TEST(Enumerate, ZeroProbabilityBranchesArePruned) {
  const auto m = enumerate_exact(WalkConfig::simplex(0.9, {1.0, 0.0}, {0.0, 1.0}, 40, 1, 0), 2);
  EXPECT_EQ(m.sequences, 1u);
  EXPECT_NEAR(m.mean[0], 1.0 - std::pow(0.9, 40), 1e-15);
}

TEST(Enumerate, BudgetIsEnforced) {
  EXPECT_THROW(enumerate_exact(WalkConfig::scalar(0.5, 0.5, 0.0, 25, 1, 0), 2), BudgetError);
  EXPECT_EQ(sequence_count(WalkConfig::scalar(0.5, 0.5, 0.0, 25, 1, 0)), std::uint64_t{1} << 25);
}

TEST(Enumerate, SupportOmittedWhenLarge) {
  const auto m = enumerate_exact(WalkConfig::scalar(0.5, 0.5, 0.0, 17, 1, 0), 2);
  EXPECT_TRUE(m.support.empty());
  EXPECT_EQ(m.sequences, std::uint64_t{1} << 17);
}

TEST(Enumerate, TailProbabilityByHand) {
  // t = 1: y = 0.5 w.p. 0.3, 0 otherwise.
  const auto cfg = WalkConfig::scalar(0.5, 0.3, 0.0, 1, 1, 0);
  EXPECT_NEAR(exact_tail_probability(cfg, 0, 0.15, 0.2), 0.3, 1e-16);
  EXPECT_NEAR(exact_tail_probability(cfg, 0, 0.15, 0.1), 1.0, 1e-16);
}

TEST(Enumerate, ScheduleRunsPhasesInOrder) {
  auto cfg = WalkConfig::simplex(0.5, {0.0, 1.0}, {1.0, 0.0}, 0, 1, 0);
  cfg.schedule = {{{0.0, 1.0}, 2}, {{1.0, 0.0}, 1}};
  const auto m = enumerate_exact(cfg, 2);
  // (1,0) -> (.5,.5) -> (.25,.75) -> (.625,.375)
  EXPECT_NEAR(m.mean[0], 0.625, 1e-16);
  EXPECT_EQ(cfg.total_steps(), 3u);
}

TEST(Enumerate, HigherCentralMomentsByHand) {
  // t = 1 from y0 = 0: y = 0.5 B, B ~ Bernoulli(0.3); E[(y - .15)^3] = .125 * .21 * .4.
  const auto m = enumerate_exact(WalkConfig::scalar(0.5, 0.3, 0.0, 1, 1, 0), 4);
  EXPECT_NEAR(m.central_moments[0][3], 0.125 * 0.21 * 0.4, 1e-17);
  EXPECT_NEAR(m.central_moments[0][4], 0.0625 * 0.21 * (1 - 3 * 0.3 + 3 * 0.09), 1e-17);
}

TEST(Probe, CheckpointsAtPowersOfTwoAndTheEnd) {
  const auto r = reciprocal_probe(WalkConfig::scalar(0.99, 0.5, 0.5, 100, 500, 1));
  std::vector<std::uint64_t> ts;
  for (const auto& c : r.checkpoints) ts.push_back(c.t);
  EXPECT_EQ(ts, (std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64, 100}));
  EXPECT_TRUE(r.necessary_condition);
}

TEST(Probe, Verdicts) {
  EXPECT_EQ(reciprocal_probe(WalkConfig::scalar(0.3, 0.5, 0.5, 2000, 2000, 2)).verdict,
            ReciprocalVerdict::apparently_divergent);
  EXPECT_EQ(reciprocal_probe(WalkConfig::scalar(0.99, 0.5, 0.5, 2000, 2000, 3)).verdict,
            ReciprocalVerdict::apparently_convergent);
}

TEST(Probe, ShortHorizonMatchesEnumeration) {
  // E[1/y_t] computed over every path for a small t. The inner terms are
  // sampled and bounded by 1/(1 - alpha), so 2e5 paths sit well inside 0.5%.
  const auto cfg = WalkConfig::scalar(0.6, 0.4, 0.5, 8, 200000, 4);
  long double expect = 0;
  for_each_path(cfg, [&](std::span<const long double> y, long double p) { expect += p / y[0]; });
  const auto r = reciprocal_probe(cfg);
  EXPECT_NEAR(r.checkpoints.back().estimate, static_cast<double>(expect), 5e-3 * static_cast<double>(expect));
}

TEST(Probe, RejectsUnsupportedWalks) {
  EXPECT_THROW(reciprocal_probe(WalkConfig::simplex(0.5, {0.2, 0.3, 0.5}, {1, 0, 0}, 10, 10, 0)), ParameterError);
  EXPECT_THROW(reciprocal_probe(WalkConfig::scalar(0.5, 0.5, 0.0, 10, 10, 0)), ParameterError);
}

// Random small walks: enumeration mean and covariance agree with the closed forms.
TEST(Property, EnumerationMatchesClosedForms) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const std::uint64_t t = 1 + rng() % (n == 2 ? 12 : 6);
    std::vector<double> q(n), y0(n);
    double sq = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sq += q[i] = unit(rng);
      sy += y0[i] = unit(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      q[i] /= sq;
      y0[i] /= sy;
    }
    const double alpha = 0.05 + 0.9 * unit(rng);
    const auto m = enumerate_exact(WalkConfig::simplex(alpha, q, y0, t, 1, 0), 2);
    const auto c = simplex_covariance(alpha, q, t);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(m.mean[i], std::pow(alpha, t) * y0[i] + (1 - std::pow(alpha, t)) * q[i], 1e-14);
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(m.cov(i, j), c.cov(i, j), 1e-14);
    }
  }
}
