#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "decayrank/analytics.hpp"
#include "decayrank/error.hpp"
#include "decayrank/walk_sim.hpp"
#include "oracles.hpp"

using namespace decayrank;

TEST(Scalar, InfiniteHorizonVariance) {
  const auto m = scalar_mean_var(0.99, 0.5, kInfinite);
  EXPECT_EQ(m.mean, 0.5);
  EXPECT_NEAR(m.variance, 0.01 / 1.99 * 0.25, 1e-17);
  EXPECT_NEAR(m.variance, 1.2563e-3, 1e-7);
}

TEST(Scalar, DegenerateQ) {
  for (std::uint64_t t : {0u, 1u, 7u}) {
    EXPECT_EQ(scalar_mean_var(0.5, 0.0, t, 0.3).variance, 0.0);
    EXPECT_EQ(scalar_mean_var(0.5, 1.0, t, 0.3).variance, 0.0);
  }
}

TEST(Scalar, MatchesEnumeration) {
  const auto c = scalar_mean_var(0.9, 0.3, 10, 0.0);
  const auto e = enumerate_exact(WalkConfig::scalar(0.9, 0.3, 0.0, 10, 1, 0), 2);
  EXPECT_NEAR(e.mean[0], c.mean, 1e-12);
  EXPECT_NEAR(e.cov(0, 0), c.variance, 1e-12);
}

TEST(Scalar, RejectsBadInput) {
  EXPECT_THROW(scalar_mean_var(1.0, 0.3, 4), ParameterError);
  EXPECT_THROW(scalar_mean_var(0.5, 1.3, 4), ParameterError);
}

TEST(Covariance, UniformKernelSpectrum) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const std::vector<double> q(n, 1.0 / n);
    const auto r = simplex_covariance(0.9, q, kInfinite);
    ASSERT_EQ(r.kernel_spectrum.eigenvalues.size(), n);
    EXPECT_NEAR(r.kernel_spectrum.eigenvalues[0], 0.0, 1e-15);
    for (std::size_t i = 1; i < n; ++i) EXPECT_NEAR(r.kernel_spectrum.eigenvalues[i], 1.0 / n, 1e-15);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(r.covariance_eigenvalues[i], r.scale * r.kernel_spectrum.eigenvalues[i], 1e-16);
    }
  }
}

TEST(Covariance, TwoByTwo) {
  const auto r = simplex_covariance(0.8, std::vector<double>{0.3, 0.7}, 5);
  ASSERT_EQ(r.kernel_spectrum.nonzero.size(), 1u);
  EXPECT_NEAR(r.kernel_spectrum.nonzero[0].value, 0.42, 1e-15);
  EXPECT_NEAR(secular_function(r.q, 0.42), 0.0, 1e-12);
  const double scale = (1 - std::pow(0.8, 10)) * 0.2 / 1.8;
  EXPECT_NEAR(r.cov(0, 0), scale * 0.21, 1e-16);
  EXPECT_NEAR(r.cov(0, 1), -scale * 0.21, 1e-16);
}

TEST(Covariance, AnnihilatesOnesAndIsSymmetric) {
  const std::vector<double> q{0.1, 0.15, 0.25, 0.5};
  const auto r = simplex_covariance(0.95, q, 30);
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      row += r.cov(i, j);
      EXPECT_EQ(r.cov(i, j), r.cov(j, i));
    }
    EXPECT_NEAR(row, 0.0, 1e-15);
  }
}

TEST(Covariance, EigenvectorsSatisfyTheKernel) {
  const std::vector<double> q{0.5, 0.3, 0.2};
  const auto r = simplex_covariance(0.5, q, kInfinite);
  for (const auto& p : r.kernel_spectrum.nonzero) {
    for (std::size_t i = 0; i < 3; ++i) {
      double kv = 0;
      for (std::size_t j = 0; j < 3; ++j) kv += r.kernel[i * 3 + j] * p.vector[j];
      EXPECT_NEAR(kv, p.value * p.vector[i], 1e-14);
    }
  }
}

TEST(Covariance, RejectsBadInput) {
  EXPECT_THROW(simplex_covariance(0.5, std::vector<double>{0.5, 0.6}, 3), ParameterError);
  EXPECT_THROW(simplex_covariance(0.5, std::vector<double>{0.5, 0.5}, 0), ParameterError);
}

TEST(Secular, RequiresDistinctPositiveQ) {
  try {
    secular_eigenvalues(std::vector<double>{0.25, 0.25, 0.5});
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("not pairwise distinct"), std::string::npos);
  }
  EXPECT_THROW(secular_eigenvalues(std::vector<double>{0.0, 1.0}), ParameterError);
}

TEST(Secular, ThreeByThreeAgainstDense) {
  const std::vector<double> q{0.5, 0.3, 0.2};
  const auto roots = secular_eigenvalues(q);
  const auto dense = oracle::dense_kernel_eigenvalues(q);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], dense[1], 1e-12);
  EXPECT_NEAR(roots[1], dense[2], 1e-12);
}

// Random Q with repeats and zeros: deflated spectrum equals the dense one.
TEST(Property, SpectrumMatchesDenseSolver) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> q(n);
    double sum = 0;
    for (auto& x : q) {
      const auto kind = rng() % 10;
      x = kind == 0 ? 0.0 : kind == 1 ? 0.125 : unit(rng);
      sum += x;
    }
    if (sum == 0) continue;
    for (auto& x : q) x /= sum;
    const auto spec = kernel_spectrum(q);
    const auto dense = oracle::dense_kernel_eigenvalues(q);
    ASSERT_EQ(spec.eigenvalues.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(spec.eigenvalues[i], dense[i], 1e-12) << trial;
    // Each secular root sits strictly between consecutive sorted distinct q's.
    std::vector<double> sorted(q);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() == n && sorted.front() > 0) {
      const auto roots = secular_eigenvalues(q);
      for (std::size_t i = 0; i < roots.size(); ++i) {
        EXPECT_GT(roots[i], sorted[i]);
        EXPECT_LT(roots[i], sorted[i + 1]);
      }
    }
  }
}

TEST(Generalized, RecoversScalarCase) {
  const auto v = VertexSet::real_columns({{0.0}, {1.0}});
  const std::vector<double> q{0.7, 0.3};
  const auto g = generalized_moments(v, q, 0.9, 10, std::vector<double>{0.0});
  const auto s = scalar_mean_var(0.9, 0.3, 10, 0.0);
  EXPECT_NEAR(g.mean[0], s.mean, 1e-15);
  EXPECT_NEAR(g.cov(0, 0), s.variance, 1e-15);
}

TEST(Generalized, IdentityVerticesMatchSimplexCovariance) {
  const std::vector<double> q{0.2, 0.3, 0.5};
  const auto g = generalized_moments(VertexSet::simplex(3), q, 0.7, kInfinite);
  const auto c = simplex_covariance(0.7, q, kInfinite);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(g.covariance[i], c.covariance[i], 1e-17);
}

TEST(Generalized, ConstantVerticesHaveNoVariance) {
  const auto v = VertexSet::real_columns({{2.0, -1.0}, {2.0, -1.0}, {2.0, -1.0}});
  const auto g = generalized_moments(v, std::vector<double>{0.2, 0.3, 0.5}, 0.5, kInfinite);
  EXPECT_NEAR(g.mean[0], 2.0, 1e-15);
  EXPECT_NEAR(g.mean[1], -1.0, 1e-15);
  for (double c : g.covariance) EXPECT_NEAR(c, 0.0, 1e-15);
}

TEST(Generalized, CubicRootsOfUnity) {
  const std::vector<double> q{0.2, 0.3, 0.5};
  const auto g = generalized_moments(VertexSet::roots_of_unity(3), q, 0.9, 12, std::vector<double>{0.0, 0.0});
  const double expected = 3 * covariance_scale(0.9, 12) * (0.06 + 0.1 + 0.15);
  EXPECT_NEAR(g.complex_variance, expected, 1e-15);
  EXPECT_NEAR(g.complex_variance, g.cov(0, 0) + g.cov(1, 1), 1e-15);
}

TEST(Generalized, RejectsMismatchedDimensions) {
  EXPECT_THROW(generalized_moments(VertexSet::simplex(3), std::vector<double>{0.5, 0.5}, 0.5, kInfinite),
               ParameterError);
  EXPECT_THROW(generalized_moments(VertexSet::simplex(2), std::vector<double>{0.5, 0.5}, 0.5, 3), ParameterError);
}

TEST(UnitCircle, Examples) {
  const std::vector<double> same{0.4, 0.4, 0.4};
  EXPECT_NEAR(unit_circle_variance(same, std::vector<double>{0.2, 0.3, 0.5}, 0.9, 7), 0.0, 1e-16);

  const std::vector<double> tri{0.0, 2 * std::numbers::pi / 3, 4 * std::numbers::pi / 3};
  const std::vector<double> uniform(3, 1.0 / 3);
  EXPECT_NEAR(unit_circle_variance(tri, uniform, 0.9, 7), covariance_scale(0.9, 7), 1e-15);

  const std::vector<double> antipodal{0.0, std::numbers::pi};
  const std::vector<double> q{0.3, 0.7};
  EXPECT_NEAR(unit_circle_variance(antipodal, q, 0.9, 7), 4 * scalar_mean_var(0.9, 0.3, 7, 0.0).variance, 1e-15);
}

TEST(Property, UnitCircleMatchesPlaneCovariance) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng() % 6;
    std::vector<double> phi(m), q(m);
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      phi[i] = 2 * std::numbers::pi * unit(rng);
      sum += q[i] = unit(rng);
    }
    for (auto& x : q) x /= sum;
    const auto g = generalized_moments(VertexSet::unit_circle(phi), q, 0.8, kInfinite);
    EXPECT_NEAR(unit_circle_variance(phi, q, 0.8, kInfinite), g.cov(0, 0) + g.cov(1, 1), 1e-12);
    EXPECT_NEAR(g.complex_variance, g.cov(0, 0) + g.cov(1, 1), 1e-12);
    EXPECT_GE(g.complex_variance, 0.0);
  }
}

TEST(Moments, LowOrdersByDirectExpansion) {
  // y - q = a (y' - q) + (1 - a)(B - q), independent terms.
  for (double a : {0.5, 0.9}) {
    for (double q : {0.1, 0.3, 0.5}) {
      const auto m = central_moments(a, q, 4);
      const double v = q - q * q;
      EXPECT_EQ(m[0], 1.0);
      EXPECT_EQ(m[1], 0.0);
      EXPECT_NEAR(m[2], (1 - a) / (1 + a) * v, 1e-16);
      EXPECT_NEAR(m[3], std::pow(1 - a, 3) / (1 - std::pow(a, 3)) * v * (1 - 2 * q), 1e-16);
      const double m4 = (6 * a * a * std::pow(1 - a, 2) * m[2] * v + std::pow(1 - a, 4) * v * (1 - 3 * q + 3 * q * q)) /
                        (1 - std::pow(a, 4));
      EXPECT_NEAR(m[4], m4, 1e-16);
    }
  }
}

TEST(Moments, AgreeWithEnumerationNearTheLimit) {
  // alpha^20 ~ 3.5e-11, so y_20 started at q is within 1e-10 of the limit law.
  const double a = 0.3, q = 0.3;
  const auto e = enumerate_exact(WalkConfig::scalar(a, q, q, 20, 1, 0), 6);
  const auto m = central_moments(a, q, 6);
  for (int k = 2; k <= 6; ++k) EXPECT_NEAR(e.central_moments[0][k], m[k], 1e-8) << k;
}

TEST(Moments, SecondOrderEqualsScalarVariance) {
  for (double a : {0.1, 0.5, 0.99}) {
    for (double q : {0.05, 0.4, 0.9}) {
      EXPECT_NEAR(central_moments(a, q, 2)[2], scalar_mean_var(a, q, kInfinite).variance, 1e-14);
    }
  }
}

TEST(Moments, RejectsBadInput) {
  EXPECT_THROW(central_moments(0.5, 0.0, 4), ParameterError);
  EXPECT_THROW(central_moments(0.5, 0.3, 65), ParameterError);
  EXPECT_THROW(central_moments(1.0, 0.3, 4), ParameterError);
}

TEST(Symmetry, Examples) {
  EXPECT_TRUE(moment_symmetry_check(0.9, 0.3, 8).all_passed);
  const auto half = central_moments(0.9, 0.5, 9);
  for (int n : {3, 5, 7, 9}) EXPECT_LE(std::fabs(half[n]), 1e-15);
  EXPECT_NEAR(central_moments(0.6, 0.2, 2)[2], central_moments(0.6, 0.8, 2)[2], 1e-16);
}

TEST(Property, ReflectionAndBoundsOnRandomParameters) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.01 + 0.98 * unit(rng);
    const double q = 0.01 + 0.49 * unit(rng);
    const auto lo = central_moments(a, q, 32);
    const auto hi = central_moments(a, 1 - q, 32);
    for (int n = 0; n <= 32; ++n) {
      EXPECT_NEAR(hi[n], (n % 2 ? -1 : 1) * lo[n], 1e-12) << a << " " << q << " " << n;
      if (n < 2) continue;
      EXPECT_GE(lo[n], -1e-15);
      EXPECT_LE(lo[n], 1 - q);
    }
  }
}

TEST(RootTrend, Examples) {
  const auto r = moment_root_trend(0.5, 0.3, 64);
  EXPECT_TRUE(r.even_nondecreasing);
  EXPECT_TRUE(r.bounded);
  EXPECT_EQ(r.limit, 0.7);
  EXPECT_LT(r.gap(64), r.gap(16));
  EXPECT_EQ(r.entries.front().order, 2);
  EXPECT_EQ(r.entries.back().order, 64);

  const auto h = moment_root_trend(0.9, 0.5, 40);
  for (const auto& e : h.entries) EXPECT_LE(e.root, 0.5);
  EXPECT_THROW(moment_root_trend(0.5, 0.6, 10), ParameterError);
}
