#include "decayrank/walk_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "decayrank/error.hpp"
#include "numeric.hpp"

namespace decayrank {

namespace {

constexpr std::uint64_t kBlockPaths = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine per path: the stream depends only on (seed, path), never
// on which thread runs the path.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL)));
}

// Draws a vertex index from a raw 64-bit variate. Only vertices with positive
// probability can be returned; the last of them absorbs rounding slack.
class VertexSampler {
 public:
  explicit VertexSampler(std::span<const double> q) {
    long double cumulative = 0.0L;
    constexpr long double two64 = 18446744073709551616.0L;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] <= 0.0) continue;
      cumulative += q[i];
      index_.push_back(i);
      const long double scaled = cumulative * two64;
      thresholds_.push_back(scaled >= two64 ? std::numeric_limits<std::uint64_t>::max()
                                            : static_cast<std::uint64_t>(scaled));
    }
  }

  std::size_t operator()(std::uint64_t u) const {
    const std::size_t last = index_.size() - 1;
    for (std::size_t k = 0; k < last; ++k) {
      if (u < thresholds_[k]) return index_[k];
    }
    return index_[last];
  }

 private:
  std::vector<std::size_t> index_;
  std::vector<std::uint64_t> thresholds_;
};

struct Phase {
  VertexSampler sampler;
  std::uint64_t steps;
};

std::vector<Phase> make_phases(const WalkConfig& cfg) {
  std::vector<Phase> out;
  for (const auto& p : cfg.phases()) out.push_back({VertexSampler(p.q), p.steps});
  return out;
}

// Jump targets pre-multiplied by (1 - alpha).
std::vector<std::vector<double>> scaled_targets(const WalkConfig& cfg) {
  std::vector<std::vector<double>> w;
  for (const auto& v : cfg.vertices.points()) {
    auto& row = w.emplace_back(v);
    for (double& x : row) x *= (1.0 - cfg.alpha);
  }
  return w;
}

struct BlockAccumulator {
  std::uint64_t n = 0;
  std::vector<double> mean;
  std::vector<double> m2;  // d x d co-moment sums
  double max_sum_deviation = 0.0;
  double min_coordinate = std::numeric_limits<double>::infinity();
  double max_modulus = 0.0;

  explicit BlockAccumulator(std::size_t d) : mean(d, 0.0), m2(d * d, 0.0) {}

  void add(std::span<const double> x, std::vector<double>& delta, bool simplex) {
    const std::size_t d = mean.size();
    ++n;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i) {
      delta[i] = x[i] - mean[i];
      mean[i] += delta[i] * inv;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double after = x[i] - mean[i];
      for (std::size_t j = 0; j < d; ++j) m2[i * d + j] += delta[j] * after;
    }
    double sum = 0.0, sq = 0.0;
    for (double v : x) {
      sum += v;
      sq += v * v;
      min_coordinate = std::min(min_coordinate, v);
    }
    if (simplex) max_sum_deviation = std::max(max_sum_deviation, std::fabs(sum - 1.0));
    max_modulus = std::max(max_modulus, std::sqrt(sq));
  }

  // Chan et al. pairwise merge.
  void merge(const BlockAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const std::size_t d = mean.size();
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double nt = na + nb;
    std::vector<double> delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = o.mean[i] - mean[i];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        m2[i * d + j] += o.m2[i * d + j] + delta[i] * delta[j] * na * nb / nt;
      }
    }
    for (std::size_t i = 0; i < d; ++i) mean[i] += delta[i] * nb / nt;
    n += o.n;
    max_sum_deviation = std::max(max_sum_deviation, o.max_sum_deviation);
    min_coordinate = std::min(min_coordinate, o.min_coordinate);
    max_modulus = std::max(max_modulus, o.max_modulus);
  }
};

void fill_central_moments(std::span<const double> samples, double mean, int order, SampleStats& out) {
  const std::size_t n = samples.size();
  out.central_moments.assign(order + 1, 0.0);
  out.central_moment_standard_errors.assign(order + 1, 0.0);
  std::vector<detail::CompensatedSum<long double>> sums(order + 1);
  for (double x : samples) {
    const long double d = static_cast<long double>(x) - mean;
    long double p = 1.0L;
    for (int k = 0; k <= order; ++k) {
      sums[k].add(p);
      p *= d;
    }
  }
  std::vector<long double> m(order + 1);
  for (int k = 0; k <= order; ++k) m[k] = sums[k].value() / static_cast<long double>(n);
  // Influence function of the k-th central moment:
  // (x - mu)^k - m_k - k m_{k-1} (x - mu).
  for (int k = 2; k <= order; ++k) {
    detail::CompensatedSum<long double> var;
    for (double x : samples) {
      const long double d = static_cast<long double>(x) - mean;
      const long double infl = std::pow(d, k) - m[k] - k * m[k - 1] * d;
      var.add(infl * infl);
    }
    out.central_moment_standard_errors[k] =
        n > 1 ? static_cast<double>(std::sqrt(var.value() / static_cast<long double>(n) /
                                              static_cast<long double>(n - 1)))
              : 0.0;
  }
  for (int k = 0; k <= order; ++k) out.central_moments[k] = static_cast<double>(m[k]);
}

}  // namespace

const char* to_string(VertexMode mode) noexcept {
  switch (mode) {
    case VertexMode::simplex: return "simplex";
    case VertexMode::real_vectors: return "real";
    case VertexMode::complex: return "complex";
  }
  return "?";
}

VertexMode vertex_mode_from_string(const std::string& name) {
  if (name == "simplex") return VertexMode::simplex;
  if (name == "real" || name == "real-vectors") return VertexMode::real_vectors;
  if (name == "complex") return VertexMode::complex;
  throw ParameterError("unknown vertex mode '" + name + "' (expected simplex, real or complex)");
}

const char* to_string(ReciprocalVerdict v) noexcept {
  return v == ReciprocalVerdict::apparently_divergent ? "apparently divergent" : "apparently convergent";
}

// ---------------------------------------------------------------------------
// VertexSet

VertexSet VertexSet::simplex(std::size_t n) {
  if (n == 0) throw ParameterError("simplex needs at least one vertex");
  VertexSet s;
  s.mode_ = VertexMode::simplex;
  s.dimension_ = n;
  s.points_.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) s.points_[i][i] = 1.0;
  return s;
}

VertexSet VertexSet::real_columns(std::vector<std::vector<double>> columns) {
  if (columns.empty()) throw ParameterError("vertex matrix has no columns");
  const std::size_t n = columns.front().size();
  if (n == 0) throw ParameterError("vertex matrix has no rows");
  for (const auto& c : columns) {
    if (c.size() != n) throw ParameterError("vertex columns have differing lengths");
    for (double x : c) {
      if (!std::isfinite(x)) throw ParameterError("vertex coordinate is not finite");
    }
  }
  VertexSet s;
  s.mode_ = VertexMode::real_vectors;
  s.dimension_ = n;
  s.points_ = std::move(columns);
  return s;
}

VertexSet VertexSet::complex_points(std::span<const std::complex<double>> points) {
  if (points.empty()) throw ParameterError("no complex vertices given");
  VertexSet s;
  s.mode_ = VertexMode::complex;
  s.dimension_ = 2;
  for (auto z : points) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParameterError("complex vertex is not finite");
    s.points_.push_back({z.real(), z.imag()});
  }
  return s;
}

VertexSet VertexSet::unit_circle(std::span<const double> angles) {
  std::vector<std::complex<double>> z;
  z.reserve(angles.size());
  for (double phi : angles) z.push_back(std::polar(1.0, phi));
  return complex_points(z);
}

VertexSet VertexSet::roots_of_unity(std::size_t m) {
  if (m == 0) throw ParameterError("need at least one root of unity");
  std::vector<double> angles(m);
  for (std::size_t k = 0; k < m; ++k) angles[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
  return unit_circle(angles);
}

std::complex<double> VertexSet::complex_point(std::size_t i) const {
  if (mode_ != VertexMode::complex) throw ParameterError("vertex set is not complex");
  return {points_.at(i)[0], points_.at(i)[1]};
}

// ---------------------------------------------------------------------------
// WalkConfig

std::vector<WalkPhase> WalkConfig::phases() const {
  if (!schedule.empty()) return schedule;
  return {WalkPhase{q, steps}};
}

std::uint64_t WalkConfig::total_steps() const {
  std::uint64_t t = 0;
  for (const auto& p : phases()) t += p.steps;
  return t;
}

void WalkConfig::validate() const {
  if (!detail::in_open_unit_interval(alpha)) throw ParameterError("alpha must lie in (0, 1)");
  const std::size_t m = vertices.count();
  if (m == 0) throw ParameterError("vertex set is empty");
  for (const auto& phase : phases()) {
    if (phase.q.size() != m) {
      throw ParameterError("q has " + std::to_string(phase.q.size()) + " entries but there are " +
                           std::to_string(m) + " vertices");
    }
    if (!detail::is_probability_vector(phase.q, 1e-12)) {
      throw ParameterError("q must be non-negative and sum to 1 within 1e-12");
    }
  }
  if (y0.size() != vertices.dimension()) {
    throw ParameterError("y0 has " + std::to_string(y0.size()) + " coordinates, expected " +
                         std::to_string(vertices.dimension()));
  }
  for (double x : y0) {
    if (!std::isfinite(x)) throw ParameterError("y0 is not finite");
  }
  if (vertices.mode() == VertexMode::simplex && !detail::is_probability_vector(y0, 1e-12)) {
    throw ParameterError("y0 must lie on the standard simplex");
  }
  if (paths == 0) throw ParameterError("paths must be at least 1");
  if (moment_order < 0 || moment_order > kMaxEnumerationOrder) {
    throw ParameterError("moment order must lie in [0, 8]");
  }
}

WalkConfig WalkConfig::simplex(double alpha, std::vector<double> q, std::vector<double> y0,
                               std::uint64_t steps, std::uint64_t paths, std::uint64_t seed) {
  WalkConfig cfg;
  cfg.alpha = alpha;
  cfg.vertices = VertexSet::simplex(q.size());
  cfg.q = std::move(q);
  cfg.y0 = std::move(y0);
  cfg.steps = steps;
  cfg.paths = paths;
  cfg.seed = seed;
  return cfg;
}

WalkConfig WalkConfig::scalar(double alpha, double q, double y0, std::uint64_t steps,
                              std::uint64_t paths, std::uint64_t seed) {
  return simplex(alpha, {q, 1.0 - q}, {y0, 1.0 - y0}, steps, paths, seed);
}

std::uint64_t infinite_horizon_steps(double alpha, bool* capped) {
  if (!detail::in_open_unit_interval(alpha)) throw ParameterError("alpha must lie in (0, 1)");
  constexpr double kCap = 1e6;
  const double t = std::ceil(std::log(1e-9) / std::log(alpha));
  if (capped) *capped = t > kCap;
  return static_cast<std::uint64_t>(std::min(std::max(t, 1.0), kCap));
}

// ---------------------------------------------------------------------------
// Monte Carlo

SampleStats run_walk(const WalkConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.vertices.dimension();
  const bool simplex = cfg.vertices.mode() == VertexMode::simplex;
  const auto phases = make_phases(cfg);
  const auto targets = scaled_targets(cfg);
  const double alpha = cfg.alpha;
  const std::uint64_t blocks = (cfg.paths + kBlockPaths - 1) / kBlockPaths;

  std::vector<BlockAccumulator> results(blocks, BlockAccumulator(d));
  std::vector<double> samples(cfg.moment_order > 0 ? cfg.paths : 0);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    std::vector<double> y(d), delta(d);
    for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
      BlockAccumulator& acc = results[b];
      const std::uint64_t first = b * kBlockPaths;
      const std::uint64_t last = std::min(cfg.paths, first + kBlockPaths);
      for (std::uint64_t path = first; path < last; ++path) {
        auto rng = path_engine(cfg.seed, path);
        std::copy(cfg.y0.begin(), cfg.y0.end(), y.begin());
        for (const auto& phase : phases) {
          for (std::uint64_t s = 0; s < phase.steps; ++s) {
            const auto& w = targets[phase.sampler(rng())];
            for (std::size_t c = 0; c < d; ++c) y[c] = alpha * y[c] + w[c];
          }
        }
        acc.add(y, delta, simplex);
        if (!samples.empty()) samples[path] = y[0];
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(hw, blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  // Fixed block order keeps the reduction bit-identical for any thread count.
  BlockAccumulator total(d);
  for (const auto& r : results) total.merge(r);

  SampleStats out;
  out.paths = cfg.paths;
  out.steps = cfg.total_steps();
  out.dimension = d;
  out.mode = cfg.vertices.mode();
  out.mean = total.mean;
  out.covariance.assign(d * d, 0.0);
  if (total.n > 1) {
    const double denom = static_cast<double>(total.n - 1);
    for (std::size_t i = 0; i < d * d; ++i) out.covariance[i] = total.m2[i] / denom;
    // Symmetrize: the Welford update accumulates delta_j * after_i.
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const double s = 0.5 * (out.covariance[i * d + j] + out.covariance[j * d + i]);
        out.covariance[i * d + j] = out.covariance[j * d + i] = s;
      }
    }
  }
  out.mean_standard_error.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.mean_standard_error[i] = std::sqrt(std::max(0.0, out.cov(i, i)) / static_cast<double>(total.n));
  }
  if (out.mode == VertexMode::complex) {
    out.complex_mean = {out.mean[0], out.mean[1]};
    out.complex_variance = out.cov(0, 0) + out.cov(1, 1);
  }
  out.max_sum_deviation = total.max_sum_deviation;
  out.min_coordinate = total.min_coordinate;
  out.max_modulus = total.max_modulus;
  if (cfg.moment_order > 0) fill_central_moments(samples, out.mean[0], cfg.moment_order, out);
  return out;
}

// ---------------------------------------------------------------------------
// Exact enumeration

std::uint64_t sequence_count(const WalkConfig& cfg) {
  std::uint64_t count = 1;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  for (const auto& phase : cfg.phases()) {
    const auto branching = static_cast<std::uint64_t>(
        std::count_if(phase.q.begin(), phase.q.end(), [](double x) { return x > 0.0; }));
    for (std::uint64_t s = 0; s < phase.steps; ++s) {
      if (branching <= 1) break;
      if (count > kMax / branching) return kMax;
      count *= branching;
    }
  }
  return count;
}

void for_each_path(const WalkConfig& cfg,
                   const std::function<void(std::span<const long double>, long double)>& visit) {
  cfg.validate();
  const std::uint64_t count = sequence_count(cfg);
  if (count > kEnumerationBudget) {
    throw BudgetError("exact enumeration needs " +
                      (count == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                            : std::to_string(count)) +
                      " vertex sequences; the budget is 2^24 = " + std::to_string(kEnumerationBudget));
  }
  const std::size_t d = cfg.vertices.dimension();
  const std::size_t m = cfg.vertices.count();
  const std::uint64_t total = cfg.total_steps();
  const long double alpha = cfg.alpha;
  const long double beta = 1.0L - alpha;

  // Per-step vertex distribution.
  const auto phases = cfg.phases();
  std::vector<const std::vector<double>*> step_q;
  step_q.reserve(total);
  for (const auto& phase : phases) {
    for (std::uint64_t s = 0; s < phase.steps; ++s) step_q.push_back(&phase.q);
  }

  std::vector<long double> ys((total + 1) * d);
  std::vector<long double> probs(total + 1);
  std::vector<std::ptrdiff_t> choice(total + 1, -1);
  for (std::size_t c = 0; c < d; ++c) ys[c] = cfg.y0[c];
  probs[0] = 1.0L;

  // Iterative depth-first walk over vertex sequences; zero-probability
  // branches are pruned.
  std::int64_t depth = 0;
  const auto t_end = static_cast<std::int64_t>(total);
  while (depth >= 0) {
    if (depth == t_end) {
      visit(std::span<const long double>(ys.data() + total * d, d), probs[total]);
      --depth;
      continue;
    }
    const auto& q = *step_q[depth];
    std::ptrdiff_t& i = choice[depth];
    do {
      ++i;
    } while (i < static_cast<std::ptrdiff_t>(m) && q[i] <= 0.0);
    if (i >= static_cast<std::ptrdiff_t>(m)) {
      i = -1;
      --depth;
      continue;
    }
    const auto& v = cfg.vertices.points()[i];
    const long double* cur = ys.data() + depth * d;
    long double* nxt = ys.data() + (depth + 1) * d;
    for (std::size_t c = 0; c < d; ++c) nxt[c] = alpha * cur[c] + beta * v[c];
    probs[depth + 1] = probs[depth] * q[i];
    ++depth;
  }
}

ExactMoments enumerate_exact(const WalkConfig& cfg, int max_order) {
  if (max_order < 0 || max_order > kMaxEnumerationOrder) throw ParameterError("max_order must lie in [0, 8]");
  const std::size_t d = cfg.vertices.dimension();
  ExactMoments out;
  out.dimension = d;
  out.mode = cfg.vertices.mode();
  out.steps = cfg.total_steps();

  std::vector<detail::CompensatedSum<long double>> mean_sum(d);
  detail::CompensatedSum<long double> mass;
  std::uint64_t sequences = 0;
  const bool keep_support = sequence_count(cfg) <= kSupportBudget;
  for_each_path(cfg, [&](std::span<const long double> y, long double p) {
    ++sequences;
    mass.add(p);
    for (std::size_t c = 0; c < d; ++c) mean_sum[c].add(p * y[c]);
    if (keep_support) {
      SupportPoint sp;
      sp.point.assign(y.begin(), y.end());
      sp.probability = static_cast<double>(p);
      out.support.push_back(std::move(sp));
    }
  });
  std::vector<long double> mean(d);
  for (std::size_t c = 0; c < d; ++c) mean[c] = mean_sum[c].value();

  std::vector<detail::CompensatedSum<long double>> cov_sum(d * d);
  std::vector<std::vector<detail::CompensatedSum<long double>>> moment_sum(
      d, std::vector<detail::CompensatedSum<long double>>(max_order + 1));
  std::vector<long double> dev(d);
  for_each_path(cfg, [&](std::span<const long double> y, long double p) {
    for (std::size_t c = 0; c < d; ++c) dev[c] = y[c] - mean[c];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) cov_sum[i * d + j].add(p * dev[i] * dev[j]);
    }
    for (std::size_t c = 0; c < d; ++c) {
      long double pw = p;
      for (int k = 0; k <= max_order; ++k) {
        moment_sum[c][k].add(pw);
        pw *= dev[c];
      }
    }
  });

  out.sequences = sequences;
  out.probability_mass = static_cast<double>(mass.value());
  out.mean.resize(d);
  for (std::size_t c = 0; c < d; ++c) out.mean[c] = static_cast<double>(mean[c]);
  out.covariance.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      out.covariance[i * d + j] = out.covariance[j * d + i] = static_cast<double>(cov_sum[i * d + j].value());
    }
  }
  out.central_moments.assign(d, std::vector<double>(max_order + 1, 0.0));
  for (std::size_t c = 0; c < d; ++c) {
    for (int k = 0; k <= max_order; ++k) out.central_moments[c][k] = static_cast<double>(moment_sum[c][k].value());
  }
  if (out.mode == VertexMode::complex) {
    out.complex_mean = {out.mean[0], out.mean[1]};
    out.complex_variance = out.cov(0, 0) + out.cov(1, 1);
  }
  return out;
}

double exact_tail_probability(const WalkConfig& cfg, std::size_t coordinate, double center, double eps) {
  if (coordinate >= cfg.vertices.dimension()) throw ParameterError("coordinate out of range");
  if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
  detail::CompensatedSum<long double> tail;
  const long double c = center, e = eps;
  for_each_path(cfg, [&](std::span<const long double> y, long double p) {
    if (std::fabs(y[coordinate] - c) >= e) tail.add(p);
  });
  return static_cast<double>(tail.value());
}

// ---------------------------------------------------------------------------
// Reciprocal probe
//
// The plain sample mean of 1/y_t cannot see the paths that dominate the
// expectation (long runs without a jump toward vertex 0 are exponentially
// rare but make 1/y_t exponentially large). The estimator therefore splits on
// the number k of trailing steps without such a jump:
//
//   E[1/y_t] = sum_{k<t} q (1-q)^k alpha^-k E[1/(alpha y_{t-k-1} + 1 - alpha)]
//              + ((1-q)/alpha)^t / y_0
//
// and only the bounded inner expectations are sampled.

ReciprocalProbeReport reciprocal_probe(const WalkConfig& cfg) {
  cfg.validate();
  if (cfg.vertices.mode() != VertexMode::simplex || cfg.vertices.dimension() != 2 || !cfg.schedule.empty()) {
    throw ParameterError("reciprocal probe needs a single-phase two-vertex simplex walk");
  }
  const double y0 = cfg.y0[0];
  if (!(y0 > 0.0)) throw ParameterError("reciprocal probe needs y0 > 0 (1/y0 is undefined)");
  if (cfg.steps == 0) throw ParameterError("reciprocal probe needs at least one step");

  const long double alpha = cfg.alpha;
  const long double q = cfg.q[0];
  const std::uint64_t steps = cfg.steps;
  const VertexSampler sampler(cfg.q);

  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t t = 1; t <= steps; t *= 2) checkpoints.push_back(t);
  if (checkpoints.back() != steps) checkpoints.push_back(steps);

  std::vector<detail::CompensatedSum<long double>> inner(steps);  // at y_s, s < steps
  std::vector<detail::CompensatedSum<long double>> naive(checkpoints.size());
  std::vector<detail::CompensatedSum<long double>> rhs(checkpoints.size());
  for (std::uint64_t path = 0; path < cfg.paths; ++path) {
    auto rng = path_engine(cfg.seed, path);
    long double y = y0;
    std::size_t next_cp = 0;
    for (std::uint64_t s = 0; s < steps; ++s) {
      inner[s].add(1.0L / (alpha * y + 1.0L - alpha));
      y = sampler(rng()) == 0 ? alpha * y + 1.0L - alpha : alpha * y;
      if (s + 1 == checkpoints[next_cp]) {
        naive[next_cp].add(1.0L / y);
        rhs[next_cp].add(1.0L / (1.0L - alpha * (1.0L - y)));
        ++next_cp;
      }
    }
  }

  const long double n = static_cast<long double>(cfg.paths);
  const long double ratio = (1.0L - q) / alpha;
  ReciprocalProbeReport report;
  report.alpha = cfg.alpha;
  report.q = cfg.q[0];
  report.y0 = y0;
  report.paths = cfg.paths;
  report.necessary_condition = cfg.alpha > 1.0 - cfg.q[0];

  long double previous = 0.0L;
  int run = 0;
  bool divergent = false;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const std::uint64_t t = checkpoints[i];
    detail::CompensatedSum<long double> est;
    long double rk = 1.0L;
    for (std::uint64_t k = 0; k < t; ++k) {
      est.add(q * rk * inner[t - 1 - k].value() / n);
      rk *= ratio;
    }
    est.add(std::pow(ratio, static_cast<long double>(t)) / y0);
    const long double e = est.value();

    ReciprocalCheckpoint cp;
    cp.t = t;
    cp.estimate = static_cast<double>(e);
    cp.log10_estimate = static_cast<double>(std::log10(e));
    cp.naive_estimate = static_cast<double>(naive[i].value() / n);
    cp.growth = i == 0 ? 1.0 : static_cast<double>(e / previous);
    const long double lhs = (alpha - 1.0L + q) / alpha * e;
    const long double r = q * rhs[i].value() / n;
    cp.lhs = static_cast<double>(lhs);
    cp.rhs = static_cast<double>(r);
    const long double scale = std::max(std::fabs(lhs), std::fabs(r));
    cp.relative_residual = scale > 0.0L ? static_cast<double>(std::fabs(lhs - r) / scale) : 0.0;
    report.checkpoints.push_back(cp);

    // Only true doublings count toward the divergence run.
    if (i > 0 && t == 2 * checkpoints[i - 1]) {
      run = (e >= 2.0L * previous) ? run + 1 : 0;
      if (run >= 3) divergent = true;
    }
    previous = e;
  }
  report.verdict = divergent ? ReciprocalVerdict::apparently_divergent : ReciprocalVerdict::apparently_convergent;
  return report;
}

}  // namespace decayrank
