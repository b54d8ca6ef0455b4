#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "decayrank/walk_sim.hpp"

namespace decayrank {

/// Number of steps t; std::nullopt stands for the infinite convolution.
using Horizon = std::optional<std::uint64_t>;
inline constexpr Horizon kInfinite = std::nullopt;

/// 1 - alpha^(2t), or 1 for the infinite horizon.
double horizon_factor(double alpha, Horizon t);

/// (1 - alpha^(2t)) (1 - alpha) / (1 + alpha): the common covariance scale.
double covariance_scale(double alpha, Horizon t);

struct ScalarMoments {
  double alpha = 0.0;
  double q = 0.0;
  Horizon t;
  double y0 = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean alpha^t y0 + (1 - alpha^t) q and variance
/// (1 - alpha^(2t)) (1 - alpha)/(1 + alpha) (q - q^2) of one coordinate.
ScalarMoments scalar_mean_var(double alpha, double q, Horizon t, double y0 = 0.0);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit length
};

/// Spectrum of the kernel diag(Q) - QQ^T.
struct KernelSpectrum {
  std::vector<double> eigenvalues;  // all n, ascending
  std::vector<EigenPair> nonzero;   // ascending by value
};

/// Spectrum via deflation plus the secular equation: each group of r equal
/// positive q contributes the eigenvalue q with multiplicity r - 1, zero
/// entries and the all-ones direction contribute 0, and the remaining
/// eigenvalues are the roots of sum_g r_g q_g / (q_g - lambda) = 0.
KernelSpectrum kernel_spectrum(std::span<const double> q);

/// Roots of sum_i q_i / (q_i - lambda) = 0, one in each gap between sorted
/// q's, ascending. Requires pairwise distinct positive q_i.
std::vector<double> secular_eigenvalues(std::span<const double> q);

/// Value of sum_i q_i / (q_i - lambda).
double secular_function(std::span<const double> q, double lambda);

struct CovarianceReport {
  std::vector<double> q;
  double alpha = 0.0;
  Horizon t;
  double scale = 0.0;               // covariance = scale * kernel
  std::vector<double> covariance;   // row-major n x n
  std::vector<double> kernel;       // diag(Q) - QQ^T
  KernelSpectrum kernel_spectrum;
  std::vector<double> covariance_eigenvalues;  // scale * kernel eigenvalues

  std::size_t n() const noexcept { return q.size(); }
  double cov(std::size_t i, std::size_t j) const { return covariance[i * q.size() + j]; }
};

/// Covariance of the simplex walk: scale(alpha, t) * (diag(Q) - QQ^T).
/// t must be >= 1 or infinite.
CovarianceReport simplex_covariance(double alpha, std::span<const double> q, Horizon t);

struct GeneralizedMoments {
  VertexMode mode = VertexMode::real_vectors;
  double alpha = 0.0;
  Horizon t;
  std::vector<double> q;
  std::vector<double> mean;        // dimension entries; (re, im) for complex
  std::vector<double> covariance;  // dimension x dimension
  std::complex<double> complex_mean{};
  double complex_variance = 0.0;   // complex mode only

  std::size_t dimension() const noexcept { return mean.size(); }
  double cov(std::size_t i, std::size_t j) const { return covariance[i * mean.size() + j]; }
};

/// Mean alpha^t y0 + (1 - alpha^t) V Q and covariance
/// scale * V (diag(Q) - QQ^T) V^T. For complex vertices also the scalar
/// variance sum |v_i|^2 (q_i - q_i^2) - sum_{i<j} (v_i conj(v_j) + v_j conj(v_i)) q_i q_j,
/// scaled. `y0` may be empty for the infinite horizon.
GeneralizedMoments generalized_moments(const VertexSet& vertices, std::span<const double> q, double alpha,
                                       Horizon t, std::span<const double> y0 = {});

/// 4 scale sum_{i<j} sin^2((phi_i - phi_j)/2) q_i q_j for unit-circle vertices at `angles`.
double unit_circle_variance(std::span<const double> angles, std::span<const double> q, double alpha, Horizon t);

// ---------------------------------------------------------------------------
// Central moments of the infinite biased Bernoulli convolution

inline constexpr int kMaxMomentOrder = 64;

struct CentralMomentTable {
  double alpha = 0.0;
  double q = 0.0;
  int max_order = 0;
  std::vector<double> values;  // M_0 .. M_N

  double operator[](int n) const { return values.at(static_cast<std::size_t>(n)); }
};

/// M_0 = 1, M_1 = 0 and for n >= 2
///   M_n = (q - q^2) / (1 - alpha^n) * sum_{k=2}^{n} C(n,k) alpha^(n-k) (1-alpha)^k
///         ((-1)^k q^(k-1) + (1-q)^(k-1)) M_{n-k}.
CentralMomentTable central_moments(double alpha, double q, int max_order);

struct SymmetryEntry {
  int order = 0;
  double at_q = 0.0;
  double at_reflected = 0.0;  // M_n(1 - q)
  double residual = 0.0;      // |M_n(1 - q) - (-1)^n M_n(q)|
  bool passed = false;
};

struct OddAtHalfEntry {
  int order = 0;
  double value = 0.0;  // M_n(1/2)
  bool passed = false;
};

struct SymmetryReport {
  double alpha = 0.0;
  double q = 0.0;
  int max_order = 0;
  double tolerance = 1e-12;
  std::vector<SymmetryEntry> reflection;
  std::vector<OddAtHalfEntry> odd_at_half;
  bool all_passed = false;
};

SymmetryReport moment_symmetry_check(double alpha, double q, int max_order);

struct RootTrendEntry {
  int order = 0;
  double moment = 0.0;
  double root = 0.0;  // sign(M_n) |M_n|^(1/n)
};

struct RootTrendReport {
  double alpha = 0.0;
  double q = 0.0;
  double limit = 0.0;  // 1 - q
  std::vector<RootTrendEntry> entries;  // n = 2..N
  bool even_nondecreasing = false;
  bool bounded = false;  // every M_n in [0, 1 - q]

  /// (1 - q) - M_n^(1/n).
  double gap(int order) const;
};

/// Requires q <= 1/2.
RootTrendReport moment_root_trend(double alpha, double q, int max_order);

}  // namespace decayrank
