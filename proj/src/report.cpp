#include "decayrank/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "decayrank/error.hpp"

namespace decayrank {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // Shortest text that reads back to the same double.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// JSON cannot carry inf/nan; they are written as strings.
Json jnum(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json jvec(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

Json jmatrix(const std::vector<double>& flat, std::size_t n) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(jvec(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i * n),
                                            flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * n))));
  }
  return rows;
}

class LongCsv {
 public:
  LongCsv() { out_ << "quantity,i,j,value\n"; }
  void scalar(const char* q, double v) { out_ << q << ",,," << num(v) << '\n'; }
  void vec(const char* q, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << q << ',' << i << ",," << num(v[i]) << '\n';
  }
  void matrix(const char* q, const std::vector<double>& flat, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out_ << q << ',' << i << ',' << j << ',' << num(flat[i * n + j]) << '\n';
    }
  }
  void cell(const char* q, std::size_t i, std::size_t j, double v) {
    out_ << q << ',' << i << ',' << j << ',' << num(v) << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

template <typename T>
T field(const Json& doc, const char* name) {
  try {
    return doc.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("walk config field '") + name + "': " + e.what());
  }
}

std::vector<double> q_vector(const Json& doc, const char* name) {
  auto v = field<std::vector<double>>(doc, name);
  if (v.empty()) throw ParameterError(std::string("walk config field '") + name + "' is empty");
  return v;
}

// RFC 4180 quoting for free-form ids.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json horizon_to_json(Horizon t) { return t ? Json(*t) : Json("inf"); }

Horizon horizon_from_json(const Json& v) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinite")) return kInfinite;
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ParameterError("horizon must be a non-negative integer or \"inf\"");
}

// ---------------------------------------------------------------------------
// WalkConfig

WalkConfig walk_config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParameterError("walk config must be a JSON object");
  WalkConfig cfg;
  const std::string mode = doc.contains("mode") ? field<std::string>(doc, "mode") : "simplex";
  const VertexMode vm = vertex_mode_from_string(mode);
  cfg.alpha = field<double>(doc, "alpha");
  if (doc.contains("schedule")) {
    const Json& sched = doc.at("schedule");
    if (!sched.is_array() || sched.empty()) throw ParameterError("walk config field 'schedule' must be a non-empty array");
    for (const auto& phase : sched) {
      cfg.schedule.push_back({q_vector(phase, "q"), field<std::uint64_t>(phase, "steps")});
    }
    cfg.q = cfg.schedule.front().q;
  } else {
    cfg.q = q_vector(doc, "q");
    cfg.steps = doc.contains("steps") ? field<std::uint64_t>(doc, "steps") : 0;
  }
  const std::size_t m = cfg.q.size();

  switch (vm) {
    case VertexMode::simplex:
      cfg.vertices = VertexSet::simplex(m);
      break;
    case VertexMode::real_vectors:
      cfg.vertices = VertexSet::real_columns(field<std::vector<std::vector<double>>>(doc, "vertices"));
      break;
    case VertexMode::complex: {
      const Json& v = doc.at("vertices");
      if (v.is_object() && v.contains("roots_of_unity")) {
        cfg.vertices = VertexSet::roots_of_unity(field<std::size_t>(v, "roots_of_unity"));
      } else if (v.is_object() && v.contains("angles")) {
        cfg.vertices = VertexSet::unit_circle(field<std::vector<double>>(v, "angles"));
      } else {
        std::vector<std::complex<double>> z;
        for (const auto& p : field<std::vector<std::vector<double>>>(doc, "vertices")) {
          if (p.size() != 2) throw ParameterError("walk config field 'vertices': complex points are [re, im] pairs");
          z.emplace_back(p[0], p[1]);
        }
        cfg.vertices = VertexSet::complex_points(z);
      }
      break;
    }
  }

  if (doc.contains("y0")) {
    cfg.y0 = field<std::vector<double>>(doc, "y0");
  } else if (vm == VertexMode::simplex) {
    cfg.y0 = cfg.q;
  } else {
    cfg.y0.assign(cfg.vertices.dimension(), 0.0);
  }
  cfg.paths = doc.contains("paths") ? field<std::uint64_t>(doc, "paths") : 1;
  cfg.seed = doc.contains("seed") ? field<std::uint64_t>(doc, "seed") : 0;
  cfg.moment_order = doc.contains("moment_order") ? field<int>(doc, "moment_order") : 0;
  cfg.validate();
  return cfg;
}

Json to_json(const WalkConfig& cfg) {
  Json j;
  j["mode"] = to_string(cfg.vertices.mode());
  j["alpha"] = cfg.alpha;
  if (cfg.schedule.empty()) {
    j["q"] = cfg.q;
    j["steps"] = cfg.steps;
  } else {
    Json s = Json::array();
    for (const auto& p : cfg.schedule) s.push_back({{"q", p.q}, {"steps", p.steps}});
    j["schedule"] = s;
  }
  if (cfg.vertices.mode() != VertexMode::simplex) j["vertices"] = cfg.vertices.points();
  j["y0"] = cfg.y0;
  j["paths"] = cfg.paths;
  j["seed"] = cfg.seed;
  j["moment_order"] = cfg.moment_order;
  return j;
}

// ---------------------------------------------------------------------------
// walk_sim reports

Json to_json(const SampleStats& s) {
  Json j;
  j["kind"] = "sample_stats";
  j["mode"] = to_string(s.mode);
  j["paths"] = s.paths;
  j["steps"] = s.steps;
  j["dimension"] = s.dimension;
  j["mean"] = jvec(s.mean);
  j["mean_standard_error"] = jvec(s.mean_standard_error);
  j["covariance"] = jmatrix(s.covariance, s.dimension);
  if (s.mode == VertexMode::complex) {
    j["complex_mean"] = {jnum(s.complex_mean.real()), jnum(s.complex_mean.imag())};
    j["complex_variance"] = jnum(s.complex_variance);
  }
  if (!s.central_moments.empty()) {
    j["central_moments"] = jvec(s.central_moments);
    j["central_moment_standard_errors"] = jvec(s.central_moment_standard_errors);
  }
  j["max_sum_deviation"] = jnum(s.max_sum_deviation);
  j["min_coordinate"] = jnum(s.min_coordinate);
  j["max_modulus"] = jnum(s.max_modulus);
  return j;
}

std::string to_csv(const SampleStats& s) {
  LongCsv c;
  c.scalar("paths", static_cast<double>(s.paths));
  c.scalar("steps", static_cast<double>(s.steps));
  c.vec("mean", s.mean);
  c.vec("mean_standard_error", s.mean_standard_error);
  c.matrix("covariance", s.covariance, s.dimension);
  if (s.mode == VertexMode::complex) c.scalar("complex_variance", s.complex_variance);
  c.vec("central_moment", s.central_moments);
  c.vec("central_moment_standard_error", s.central_moment_standard_errors);
  return c.str();
}

Json to_json(const ExactMoments& m) {
  Json j;
  j["kind"] = "exact_moments";
  j["mode"] = to_string(m.mode);
  j["sequences"] = m.sequences;
  j["steps"] = m.steps;
  j["dimension"] = m.dimension;
  j["probability_mass"] = m.probability_mass;
  j["mean"] = jvec(m.mean);
  j["covariance"] = jmatrix(m.covariance, m.dimension);
  Json cm = Json::array();
  for (const auto& row : m.central_moments) cm.push_back(jvec(row));
  j["central_moments"] = cm;
  if (m.mode == VertexMode::complex) {
    j["complex_mean"] = {m.complex_mean.real(), m.complex_mean.imag()};
    j["complex_variance"] = m.complex_variance;
  }
  if (!m.support.empty()) {
    Json sup = Json::array();
    for (const auto& p : m.support) sup.push_back({{"point", p.point}, {"probability", p.probability}});
    j["support"] = sup;
  }
  return j;
}

std::string to_csv(const ExactMoments& m) {
  LongCsv c;
  c.scalar("sequences", static_cast<double>(m.sequences));
  c.scalar("probability_mass", m.probability_mass);
  c.vec("mean", m.mean);
  c.matrix("covariance", m.covariance, m.dimension);
  for (std::size_t coord = 0; coord < m.central_moments.size(); ++coord) {
    for (std::size_t k = 0; k < m.central_moments[coord].size(); ++k) {
      c.cell("central_moment", coord, k, m.central_moments[coord][k]);
    }
  }
  if (m.mode == VertexMode::complex) c.scalar("complex_variance", m.complex_variance);
  return c.str();
}

Json to_json(const ReciprocalProbeReport& r) {
  Json j;
  j["kind"] = "reciprocal_probe";
  j["heuristic"] = true;
  j["note"] = ReciprocalProbeReport::kNote;
  j["alpha"] = r.alpha;
  j["q"] = r.q;
  j["y0"] = r.y0;
  j["paths"] = r.paths;
  j["necessary_condition_alpha_gt_1_minus_q"] = r.necessary_condition;
  j["verdict"] = to_string(r.verdict);
  Json cps = Json::array();
  for (const auto& cp : r.checkpoints) {
    cps.push_back({{"t", cp.t},
                   {"estimate", jnum(cp.estimate)},
                   {"log10_estimate", jnum(cp.log10_estimate)},
                   {"naive_estimate", jnum(cp.naive_estimate)},
                   {"growth", jnum(cp.growth)},
                   {"lhs", jnum(cp.lhs)},
                   {"rhs", jnum(cp.rhs)},
                   {"relative_residual", jnum(cp.relative_residual)}});
  }
  j["checkpoints"] = cps;
  return j;
}

std::string to_csv(const ReciprocalProbeReport& r) {
  std::ostringstream out;
  out << "t,estimate,log10_estimate,naive_estimate,growth,lhs,rhs,relative_residual\n";
  for (const auto& cp : r.checkpoints) {
    out << cp.t << ',' << num(cp.estimate) << ',' << num(cp.log10_estimate) << ',' << num(cp.naive_estimate)
        << ',' << num(cp.growth) << ',' << num(cp.lhs) << ',' << num(cp.rhs) << ',' << num(cp.relative_residual)
        << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// analytics reports

Json to_json(const ScalarMoments& m) {
  return {{"kind", "scalar_moments"}, {"alpha", m.alpha}, {"q", m.q}, {"t", horizon_to_json(m.t)},
          {"y0", m.y0},          {"mean", m.mean},   {"variance", m.variance}};
}

Json to_json(const CovarianceReport& r) {
  Json j;
  j["kind"] = "covariance_report";
  j["q"] = r.q;
  j["alpha"] = r.alpha;
  j["t"] = horizon_to_json(r.t);
  j["scale"] = r.scale;
  j["covariance"] = jmatrix(r.covariance, r.n());
  j["kernel"] = jmatrix(r.kernel, r.n());
  j["kernel_eigenvalues"] = r.kernel_spectrum.eigenvalues;
  j["covariance_eigenvalues"] = r.covariance_eigenvalues;
  Json pairs = Json::array();
  for (const auto& p : r.kernel_spectrum.nonzero) pairs.push_back({{"value", p.value}, {"vector", p.vector}});
  j["nonzero_kernel_eigenpairs"] = pairs;
  return j;
}

std::string to_csv(const CovarianceReport& r) {
  LongCsv c;
  c.scalar("scale", r.scale);
  c.matrix("covariance", r.covariance, r.n());
  c.vec("kernel_eigenvalue", r.kernel_spectrum.eigenvalues);
  c.vec("covariance_eigenvalue", r.covariance_eigenvalues);
  for (std::size_t k = 0; k < r.kernel_spectrum.nonzero.size(); ++k) {
    const auto& p = r.kernel_spectrum.nonzero[k];
    for (std::size_t i = 0; i < p.vector.size(); ++i) c.cell("eigenvector", k, i, p.vector[i]);
  }
  return c.str();
}

Json to_json(const GeneralizedMoments& g) {
  Json j;
  j["kind"] = "generalized_moments";
  j["mode"] = to_string(g.mode);
  j["alpha"] = g.alpha;
  j["t"] = horizon_to_json(g.t);
  j["q"] = g.q;
  j["mean"] = g.mean;
  j["covariance"] = jmatrix(g.covariance, g.dimension());
  if (g.mode == VertexMode::complex) {
    j["complex_mean"] = {g.complex_mean.real(), g.complex_mean.imag()};
    j["complex_variance"] = g.complex_variance;
  }
  return j;
}

Json to_json(const CentralMomentTable& t) {
  return {{"kind", "central_moments"}, {"alpha", t.alpha}, {"q", t.q}, {"max_order", t.max_order}, {"values", t.values}};
}

std::string to_csv(const CentralMomentTable& t) {
  LongCsv c;
  c.vec("central_moment", t.values);
  return c.str();
}

Json to_json(const SymmetryReport& r) {
  Json refl = Json::array();
  for (const auto& e : r.reflection) {
    refl.push_back({{"order", e.order}, {"at_q", e.at_q}, {"at_reflected", e.at_reflected},
                    {"residual", e.residual}, {"passed", e.passed}});
  }
  Json odd = Json::array();
  for (const auto& e : r.odd_at_half) odd.push_back({{"order", e.order}, {"value", e.value}, {"passed", e.passed}});
  return {{"kind", "moment_symmetry"}, {"alpha", r.alpha}, {"q", r.q}, {"max_order", r.max_order},
          {"tolerance", r.tolerance}, {"reflection", refl}, {"odd_at_half", odd}, {"all_passed", r.all_passed}};
}

Json to_json(const RootTrendReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back({{"order", e.order}, {"moment", e.moment}, {"root", e.root}});
  return {{"kind", "moment_root_trend"}, {"alpha", r.alpha}, {"q", r.q}, {"limit", r.limit},
          {"entries", entries}, {"even_nondecreasing", r.even_nondecreasing}, {"bounded", r.bounded}};
}

// ---------------------------------------------------------------------------
// bounds reports

Json to_json(const BoundReport& r) {
  Json items = Json::array();
  for (const auto& b : r.items) {
    items.push_back({{"q", b.q},
                     {"bound", b.bound},
                     {"bound_unclamped", b.bound_unclamped},
                     {"sqrt_bound", b.sqrt_bound},
                     {"sqrt_bound_unclamped", b.sqrt_bound_unclamped},
                     {"interval", {b.interval_low, b.interval_high}}});
  }
  Json j{{"kind", "bound_report"},
         {"alpha", r.alpha},
         {"epsilon", r.epsilon},
         {"t", horizon_to_json(r.t)},
         {"sqrt_epsilon", r.sqrt_epsilon},
         {"items", items},
         {"vector_bound", r.vector_bound},
         {"vector_bound_unclamped", r.vector_bound_unclamped},
         {"worst_case_sqrt_bound", r.worst_case_sqrt_bound},
         {"seven_eighths_coverage", r.seven_eighths_coverage}};
  j["relative_error_threshold"] = r.relative_error_threshold ? Json(*r.relative_error_threshold) : Json(nullptr);
  return j;
}

std::string to_csv(const BoundReport& r) {
  LongCsv c;
  c.scalar("epsilon", r.epsilon);
  c.scalar("sqrt_epsilon", r.sqrt_epsilon);
  for (std::size_t i = 0; i < r.items.size(); ++i) {
    c.cell("q", i, 0, r.items[i].q);
    c.cell("bound", i, 0, r.items[i].bound);
    c.cell("bound_unclamped", i, 0, r.items[i].bound_unclamped);
    c.cell("sqrt_bound", i, 0, r.items[i].sqrt_bound);
  }
  c.scalar("vector_bound", r.vector_bound);
  c.scalar("vector_bound_unclamped", r.vector_bound_unclamped);
  c.scalar("worst_case_sqrt_bound", r.worst_case_sqrt_bound);
  if (r.relative_error_threshold) c.scalar("relative_error_threshold", *r.relative_error_threshold);
  return c.str();
}

std::string render_text(const BoundReport& r) {
  std::ostringstream out;
  out << "alpha " << num(r.alpha) << ", epsilon " << num(r.epsilon) << ", t "
      << (r.t ? std::to_string(*r.t) : std::string("inf")) << '\n';
  for (const auto& b : r.items) {
    out << "  q = " << num(b.q) << ": P(|y - q| >= eps) <= " << num(b.bound) << "  (at least "
        << num(100.0 * (1.0 - b.bound)) << "% inside [" << num(b.interval_low) << ", " << num(b.interval_high)
        << "])\n";
  }
  out << "  vector bound: " << num(r.vector_bound) << '\n';
  out << "  eps = sqrt(1 - alpha) = " << num(r.sqrt_epsilon) << ": worst-case bound " << num(r.worst_case_sqrt_bound)
      << (r.seven_eighths_coverage ? " (about 7/8 coverage)" : "") << '\n';
  if (r.relative_error_threshold) {
    out << "  relative error eps holds with probability >= 1 - eps for q >= " << num(*r.relative_error_threshold)
        << '\n';
  }
  return out.str();
}

Json to_json(const RegimeSwitchMean& r) {
  return {{"kind", "regime_switch_mean"},
          {"mean", r.mean},
          {"weights", {{"x", r.weight_x}, {"p1", r.weight_p1}, {"p2", r.weight_p2}}}};
}

Json to_json(const BoostRatio& b) {
  return {{"kind", "boost_ratio"}, {"alpha", b.alpha},           {"t1", b.t1},
          {"t2", b.t2},            {"exact", b.exact},           {"approximate", b.approximate},
          {"counting", b.counting}, {"relative_gap", b.relative_gap}};
}

std::string to_csv(const BoostRatio& b) {
  LongCsv c;
  c.scalar("exact", b.exact);
  c.scalar("approximate", b.approximate);
  c.scalar("counting", b.counting);
  c.scalar("relative_gap", b.relative_gap);
  return c.str();
}

// ---------------------------------------------------------------------------

Json to_json(const RankReport& r) {
  Json top = Json::array();
  for (std::size_t i = 0; i < r.top.size(); ++i) {
    top.push_back({{"rank", i + 1}, {"item", r.top[i].id}, {"probability", round12(r.top[i].probability)}});
  }
  return {{"step", r.step}, {"top", top}};
}

std::string to_csv(const RankReport& r, bool header) {
  std::ostringstream out;
  if (header) out << "step,rank,item,probability\n";
  for (std::size_t i = 0; i < r.top.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", r.top[i].probability);
    out << r.step << ',' << i + 1 << ',' << csv_field(r.top[i].id) << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace decayrank
