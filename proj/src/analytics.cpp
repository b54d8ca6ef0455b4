#include "decayrank/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "decayrank/error.hpp"
#include "numeric.hpp"

namespace decayrank {

namespace {

void require_alpha(double alpha) {
  if (!detail::in_open_unit_interval(alpha)) throw ParameterError("alpha must lie in (0, 1)");
}

void require_distribution(std::span<const double> q) {
  if (!detail::is_probability_vector(q, 1e-12)) {
    throw ParameterError("Q must be a probability vector (non-negative, summing to 1 within 1e-12)");
  }
}

// alpha^t, with the infinite horizon mapped to 0.
double decay_power(double alpha, Horizon t) {
  return t ? std::pow(alpha, static_cast<double>(*t)) : 0.0;
}

// 1 - alpha^t, computed without cancellation.
double decay_complement(double alpha, Horizon t) {
  return t ? detail::one_minus_pow(alpha, static_cast<double>(*t)) : 1.0;
}

struct Pole {
  double position;
  double weight;
};

double secular_value(std::span<const Pole> poles, double lambda) {
  double f = 0.0;
  for (const auto& p : poles) f += p.weight / (p.position - lambda);
  return f;
}

// Root of sum_g w_g / (d_g - lambda) = 0 between consecutive poles a < b. The
// function increases from -inf to +inf across the gap. Bisection runs in
// coordinates shifted to the nearer pole so that roots hugging a pole keep
// their relative accuracy.
double bisect_gap(std::span<const Pole> poles, std::size_t gap) {
  const double a = poles[gap].position;
  const double b = poles[gap + 1].position;
  const double mid = a + 0.5 * (b - a);
  const bool near_a = secular_value(poles, mid) > 0.0;
  const double origin = near_a ? a : b;

  std::vector<Pole> shifted(poles.begin(), poles.end());
  for (auto& p : shifted) p.position -= origin;
  shifted[near_a ? gap : gap + 1].position = 0.0;

  double lo = near_a ? 0.0 : (a - b) * 0.5;
  double hi = near_a ? (b - a) * 0.5 : 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double m = lo + 0.5 * (hi - lo);
    if (m <= lo || m >= hi) break;
    if (secular_value(shifted, m) > 0.0) {
      hi = m;
    } else {
      lo = m;
    }
  }
  return origin + (lo + 0.5 * (hi - lo));
}

std::vector<double> secular_roots(std::span<const Pole> poles) {
  std::vector<double> roots;
  for (std::size_t g = 0; g + 1 < poles.size(); ++g) roots.push_back(bisect_gap(poles, g));
  return roots;
}

std::vector<double> normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

double horizon_factor(double alpha, Horizon t) {
  require_alpha(alpha);
  return t ? detail::one_minus_pow(alpha, 2.0 * static_cast<double>(*t)) : 1.0;
}

double covariance_scale(double alpha, Horizon t) {
  return horizon_factor(alpha, t) * (1.0 - alpha) / (1.0 + alpha);
}

ScalarMoments scalar_mean_var(double alpha, double q, Horizon t, double y0) {
  require_alpha(alpha);
  if (!std::isfinite(q) || q < 0.0 || q > 1.0) throw ParameterError("q must lie in [0, 1]");
  if (!std::isfinite(y0)) throw ParameterError("y0 must be finite");
  ScalarMoments m;
  m.alpha = alpha;
  m.q = q;
  m.t = t;
  m.y0 = y0;
  m.mean = t ? decay_power(alpha, t) * y0 + decay_complement(alpha, t) * q : q;
  m.variance = covariance_scale(alpha, t) * (q - q * q);
  return m;
}

double secular_function(std::span<const double> q, double lambda) {
  double f = 0.0;
  for (double x : q) f += x / (x - lambda);
  return f;
}

std::vector<double> secular_eigenvalues(std::span<const double> q) {
  require_distribution(q);
  std::vector<double> sorted(q.begin(), q.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() <= 0.0) throw ParameterError("secular equation needs every q_i > 0");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("q_i are not pairwise distinct; the secular equation characterization does not apply");
  }
  std::vector<Pole> poles;
  for (double x : sorted) poles.push_back({x, x});
  return secular_roots(poles);
}

KernelSpectrum kernel_spectrum(std::span<const double> q) {
  require_distribution(q);
  const std::size_t n = q.size();

  // Positive values grouped by exact equality, in ascending order.
  std::map<double, std::vector<std::size_t>> groups;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] > 0.0) {
      groups[q[i]].push_back(i);
    } else {
      ++zeros;
    }
  }

  KernelSpectrum spec;
  spec.eigenvalues.assign(zeros + 1, 0.0);

  std::vector<Pole> poles;
  for (const auto& [value, members] : groups) {
    poles.push_back({value, value * static_cast<double>(members.size())});
    // Helmert basis of the zero-sum vectors supported on the group.
    for (std::size_t j = 1; j < members.size(); ++j) {
      std::vector<double> v(n, 0.0);
      const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
      for (std::size_t k = 0; k < j; ++k) v[members[k]] = 1.0 / norm;
      v[members[j]] = -static_cast<double>(j) / norm;
      spec.eigenvalues.push_back(value);
      spec.nonzero.push_back({value, std::move(v)});
    }
  }
  for (double lambda : secular_roots(poles)) {
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] > 0.0) v[i] = q[i] / (q[i] - lambda);
    }
    spec.eigenvalues.push_back(lambda);
    spec.nonzero.push_back({lambda, normalized(std::move(v))});
  }
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end());
  std::stable_sort(spec.nonzero.begin(), spec.nonzero.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return spec;
}

CovarianceReport simplex_covariance(double alpha, std::span<const double> q, Horizon t) {
  require_alpha(alpha);
  require_distribution(q);
  if (t && *t == 0) throw ParameterError("t must be at least 1 (or infinite)");
  const std::size_t n = q.size();
  CovarianceReport r;
  r.q.assign(q.begin(), q.end());
  r.alpha = alpha;
  r.t = t;
  r.scale = covariance_scale(alpha, t);
  r.kernel.resize(n * n);
  r.covariance.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = (i == j ? q[i] : 0.0) - q[i] * q[j];
      r.kernel[i * n + j] = k;
      r.covariance[i * n + j] = r.scale * k;
    }
  }
  r.kernel_spectrum = kernel_spectrum(q);
  for (double lambda : r.kernel_spectrum.eigenvalues) r.covariance_eigenvalues.push_back(r.scale * lambda);
  return r;
}

GeneralizedMoments generalized_moments(const VertexSet& vertices, std::span<const double> q, double alpha,
                                       Horizon t, std::span<const double> y0) {
  require_alpha(alpha);
  require_distribution(q);
  const std::size_t m = vertices.count();
  const std::size_t d = vertices.dimension();
  if (q.size() != m) {
    throw ParameterError("V has " + std::to_string(m) + " columns but Q has " + std::to_string(q.size()) + " entries");
  }
  if (t && y0.size() != d) throw ParameterError("finite horizon needs a start point with " + std::to_string(d) + " coordinates");
  if (!t && !y0.empty() && y0.size() != d) throw ParameterError("start point has the wrong dimension");

  GeneralizedMoments g;
  g.mode = vertices.mode();
  g.alpha = alpha;
  g.t = t;
  g.q.assign(q.begin(), q.end());

  const double keep = decay_power(alpha, t);
  const double move = decay_complement(alpha, t);
  g.mean.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    detail::CompensatedSum<double> vq;
    for (std::size_t i = 0; i < m; ++i) vq.add(vertices.point(i)[c] * q[i]);
    g.mean[c] = (t ? keep * y0[c] : 0.0) + move * vq.value();
  }

  // scale * V (diag(Q) - QQ^T) V^T, summed entry by entry.
  const double scale = covariance_scale(alpha, t);
  g.covariance.assign(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      detail::CompensatedSum<double> s;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double k = (i == j ? q[i] : 0.0) - q[i] * q[j];
          s.add(vertices.point(i)[a] * k * vertices.point(j)[b]);
        }
      }
      g.covariance[a * d + b] = g.covariance[b * d + a] = scale * s.value();
    }
  }

  if (g.mode == VertexMode::complex) {
    g.complex_mean = {g.mean[0], g.mean[1]};
    detail::CompensatedSum<double> s;
    for (std::size_t i = 0; i < m; ++i) s.add(std::norm(vertices.complex_point(i)) * (q[i] - q[i] * q[i]));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto vi = vertices.complex_point(i), vj = vertices.complex_point(j);
        const double cross = (vi * std::conj(vj) + vj * std::conj(vi)).real();
        s.add(-cross * q[i] * q[j]);
      }
    }
    g.complex_variance = scale * s.value();
  }
  return g;
}

double unit_circle_variance(std::span<const double> angles, std::span<const double> q, double alpha, Horizon t) {
  require_alpha(alpha);
  require_distribution(q);
  if (angles.size() != q.size()) throw ParameterError("angle count does not match |Q|");
  for (double phi : angles) {
    if (!std::isfinite(phi)) throw ParameterError("angle is not finite");
  }
  detail::CompensatedSum<double> s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const double h = std::sin(0.5 * (angles[i] - angles[j]));
      s.add(h * h * q[i] * q[j]);
    }
  }
  return 4.0 * covariance_scale(alpha, t) * s.value();
}

// ---------------------------------------------------------------------------

CentralMomentTable central_moments(double alpha, double q, int max_order) {
  require_alpha(alpha);
  if (!detail::in_open_unit_interval(q)) throw ParameterError("q must lie in (0, 1)");
  if (max_order < 0 || max_order > kMaxMomentOrder) {
    throw ParameterError("moment order must lie in [0, " + std::to_string(kMaxMomentOrder) + "]");
  }
  const int n_max = max_order;
  const double beta = 1.0 - alpha;
  const double p = 1.0 - q;

  // Binomials as doubles: C(64, 32) ~ 1.8e18 is past exact 53-bit integers.
  std::vector<std::vector<double>> binom(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    binom[n].assign(n + 1, 1.0);
    for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
  }
  std::vector<double> alpha_pow(n_max + 1, 1.0), beta_pow(n_max + 1, 1.0), q_pow(n_max + 1, 1.0),
      p_pow(n_max + 1, 1.0);
  for (int k = 1; k <= n_max; ++k) {
    alpha_pow[k] = alpha_pow[k - 1] * alpha;
    beta_pow[k] = beta_pow[k - 1] * beta;
    q_pow[k] = q_pow[k - 1] * q;
    p_pow[k] = p_pow[k - 1] * p;
  }

  CentralMomentTable table;
  table.alpha = alpha;
  table.q = q;
  table.max_order = max_order;
  table.values.assign(n_max + 1, 0.0);
  table.values[0] = 1.0;
  if (n_max >= 1) table.values[1] = 0.0;
  const double qq = q - q * q;
  for (int n = 2; n <= n_max; ++n) {
    detail::CompensatedSum<double> s;
    for (int k = 2; k <= n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double bracket = sign * q_pow[k - 1] + p_pow[k - 1];
      s.add(binom[n][k] * alpha_pow[n - k] * beta_pow[k] * bracket * table.values[n - k]);
    }
    table.values[n] = qq / detail::one_minus_pow(alpha, n) * s.value();
  }
  return table;
}

SymmetryReport moment_symmetry_check(double alpha, double q, int max_order) {
  const auto at_q = central_moments(alpha, q, max_order);
  const auto reflected = central_moments(alpha, 1.0 - q, max_order);
  const auto half = central_moments(alpha, 0.5, max_order);
  SymmetryReport r;
  r.alpha = alpha;
  r.q = q;
  r.max_order = max_order;
  r.all_passed = true;
  for (int n = 0; n <= max_order; ++n) {
    SymmetryEntry e;
    e.order = n;
    e.at_q = at_q[n];
    e.at_reflected = reflected[n];
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    e.residual = std::fabs(reflected[n] - sign * at_q[n]);
    e.passed = e.residual <= r.tolerance;
    r.all_passed = r.all_passed && e.passed;
    r.reflection.push_back(e);
  }
  for (int n = 1; n <= max_order; n += 2) {
    OddAtHalfEntry e;
    e.order = n;
    e.value = half[n];
    e.passed = std::fabs(e.value) <= 1e-15;
    r.all_passed = r.all_passed && e.passed;
    r.odd_at_half.push_back(e);
  }
  return r;
}

double RootTrendReport::gap(int order) const {
  for (const auto& e : entries) {
    if (e.order == order) return limit - e.root;
  }
  throw ParameterError("order " + std::to_string(order) + " not in the trend report");
}

RootTrendReport moment_root_trend(double alpha, double q, int max_order) {
  if (!(q <= 0.5)) throw ParameterError("root trend requires q <= 1/2 (so that q <= 1 - q); got q = " + std::to_string(q));
  if (max_order < 2) throw ParameterError("root trend needs max order >= 2");
  const auto table = central_moments(alpha, q, max_order);
  RootTrendReport r;
  r.alpha = alpha;
  r.q = q;
  r.limit = 1.0 - q;
  r.even_nondecreasing = true;
  r.bounded = true;
  double previous_even = -1.0;
  for (int n = 2; n <= max_order; ++n) {
    const double m = table[n];
    RootTrendEntry e;
    e.order = n;
    e.moment = m;
    e.root = std::copysign(std::pow(std::fabs(m), 1.0 / n), m);
    r.entries.push_back(e);
    if (!(m >= 0.0 && m <= r.limit)) r.bounded = false;
    if (n % 2 == 0) {
      if (e.root < previous_even) r.even_nondecreasing = false;
      previous_even = e.root;
    }
  }
  return r;
}

}  // namespace decayrank
