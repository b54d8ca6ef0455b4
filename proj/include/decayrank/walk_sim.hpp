#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decayrank {

enum class VertexMode { simplex, real_vectors, complex };

const char* to_string(VertexMode mode) noexcept;
VertexMode vertex_mode_from_string(const std::string& name);

// Vertices the walk jumps toward. Every mode is stored as a list of real
// points of a common dimension: unit vectors for the simplex, the columns of
// V for real vectors, and (re, im) pairs for complex vertices.
class VertexSet {
 public:
  static VertexSet simplex(std::size_t n);
  /// `columns[j]` is vertex j; all columns must share one length.
  static VertexSet real_columns(std::vector<std::vector<double>> columns);
  static VertexSet complex_points(std::span<const std::complex<double>> points);
  static VertexSet unit_circle(std::span<const double> angles);
  static VertexSet roots_of_unity(std::size_t m);

  VertexMode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t count() const noexcept { return points_.size(); }
  std::span<const double> point(std::size_t i) const { return points_.at(i); }
  std::complex<double> complex_point(std::size_t i) const;
  const std::vector<std::vector<double>>& points() const noexcept { return points_; }

 private:
  VertexMode mode_ = VertexMode::simplex;
  std::size_t dimension_ = 0;
  std::vector<std::vector<double>> points_;
};

/// One stretch of the walk with a fixed vertex distribution.
struct WalkPhase {
  std::vector<double> q;
  std::uint64_t steps = 0;
};

struct WalkConfig {
  double alpha = 0.9;
  std::vector<double> q;      // vertex probabilities, |q| == vertices.count()
  VertexSet vertices;
  std::vector<double> y0;     // start point, vertices.dimension() entries
  std::uint64_t steps = 0;
  std::uint64_t paths = 1;
  std::uint64_t seed = 0;
  /// When non-empty, replaces (q, steps) with a piecewise-constant schedule.
  std::vector<WalkPhase> schedule;
  /// Monte Carlo central moments of coordinate 0 up to this order (0 = off).
  int moment_order = 0;

  /// Throws ParameterError on any violated invariant.
  void validate() const;
  std::vector<WalkPhase> phases() const;
  std::uint64_t total_steps() const;

  /// Simplex walk with n = |q| and start point y0.
  static WalkConfig simplex(double alpha, std::vector<double> q, std::vector<double> y0,
                            std::uint64_t steps, std::uint64_t paths, std::uint64_t seed);
  /// Two-vertex simplex walk tracking one coordinate: q is P(jump to vertex 0).
  static WalkConfig scalar(double alpha, double q, double y0, std::uint64_t steps,
                           std::uint64_t paths, std::uint64_t seed);
};

struct SampleStats {
  std::uint64_t paths = 0;
  std::uint64_t steps = 0;
  std::size_t dimension = 0;
  VertexMode mode = VertexMode::simplex;
  std::vector<double> mean;
  std::vector<double> mean_standard_error;
  std::vector<double> covariance;  // row-major, dimension x dimension, (N - 1) denominator

  // Complex mode: (re, im) of the mean and E|z - Ez|^2 (= covariance trace).
  std::complex<double> complex_mean{};
  double complex_variance = 0.0;

  // Central moments of coordinate 0 about the sample mean, orders 0..moment_order,
  // with delta-method standard errors.
  std::vector<double> central_moments;
  std::vector<double> central_moment_standard_errors;

  // Invariant monitors over every endpoint.
  double max_sum_deviation = 0.0;  // max |sum(y) - 1| (simplex mode)
  double min_coordinate = 0.0;
  double max_modulus = 0.0;        // max |y| (Euclidean)

  double cov(std::size_t i, std::size_t j) const { return covariance[i * dimension + j]; }
};

SampleStats run_walk(const WalkConfig& cfg);

/// Smallest t with alpha^t < 1e-9, capped at 10^6. `capped` is set when the
/// cap applied.
std::uint64_t infinite_horizon_steps(double alpha, bool* capped = nullptr);

// ---------------------------------------------------------------------------
// Exact enumeration

inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kSupportBudget = std::uint64_t{1} << 16;
inline constexpr int kMaxEnumerationOrder = 8;

struct SupportPoint {
  std::vector<double> point;
  double probability = 0.0;
};

struct ExactMoments {
  std::uint64_t sequences = 0;
  std::uint64_t steps = 0;
  std::size_t dimension = 0;
  VertexMode mode = VertexMode::simplex;
  double probability_mass = 0.0;  // sum of path probabilities, 1 up to rounding
  std::vector<double> mean;
  std::vector<double> covariance;  // row-major
  /// central_moments[c][k] = E[(y_c - E y_c)^k], k = 0..max_order.
  std::vector<std::vector<double>> central_moments;
  std::complex<double> complex_mean{};
  double complex_variance = 0.0;
  /// Every endpoint with its path probability when sequences <= 2^16,
  /// in lexicographic order of the vertex sequence.
  std::vector<SupportPoint> support;

  double cov(std::size_t i, std::size_t j) const { return covariance[i * dimension + j]; }
};

/// Number of vertex sequences for cfg, saturating at UINT64_MAX.
std::uint64_t sequence_count(const WalkConfig& cfg);

/// Calls `visit(point, probability)` for every vertex sequence in
/// lexicographic order. Throws BudgetError when the count exceeds 2^24.
void for_each_path(const WalkConfig& cfg,
                   const std::function<void(std::span<const long double>, long double)>& visit);

ExactMoments enumerate_exact(const WalkConfig& cfg, int max_order);

/// P(|y_c - center| >= eps) by exact enumeration.
double exact_tail_probability(const WalkConfig& cfg, std::size_t coordinate, double center,
                              double eps);

// ---------------------------------------------------------------------------
// Reciprocal-moment probe (heuristic)

struct ReciprocalCheckpoint {
  std::uint64_t t = 0;
  double estimate = 0.0;        // E[1/y_t], may be +inf in double
  double log10_estimate = 0.0;
  double naive_estimate = 0.0;  // plain sample mean of 1/y_t
  double growth = 0.0;          // estimate(t) / estimate(previous checkpoint)
  double lhs = 0.0;             // (alpha - 1 + q) / alpha * E[1/y_t]
  double rhs = 0.0;             // q * E[1 / (1 - alpha (1 - y_t))]
  double relative_residual = 0.0;
};

enum class ReciprocalVerdict { apparently_convergent, apparently_divergent };

const char* to_string(ReciprocalVerdict v) noexcept;

struct ReciprocalProbeReport {
  double alpha = 0.0;
  double q = 0.0;
  double y0 = 0.0;
  std::uint64_t paths = 0;
  std::vector<ReciprocalCheckpoint> checkpoints;
  ReciprocalVerdict verdict = ReciprocalVerdict::apparently_convergent;
  bool necessary_condition = false;  // alpha > 1 - q
  static constexpr const char* kNote =
      "heuristic: classification from sampled estimates, not a proof of existence";
};

/// Tracks coordinate 0 of a two-vertex simplex walk (q = cfg.q[0],
/// y0 = cfg.y0[0]) for cfg.steps steps, reporting E[1/y_t] at t = 1, 2, 4, ...
/// and at cfg.steps. Divergent when the estimate at least doubles across three
/// consecutive doublings of t.
ReciprocalProbeReport reciprocal_probe(const WalkConfig& cfg);

}  // namespace decayrank
