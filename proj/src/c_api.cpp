#include "decayrank/decayrank.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "decayrank/acceptance.hpp"
#include "decayrank/analytics.hpp"
#include "decayrank/bounds.hpp"
#include "decayrank/decay_ranker.hpp"
#include "decayrank/error.hpp"
#include "decayrank/report.hpp"
#include "decayrank/walk_sim.hpp"

struct dr_ranker {
  decayrank::DecayRankTable table;
};

namespace {

using namespace decayrank;

thread_local std::string last_error;

dr_status fail(dr_status code, std::string message) {
  last_error = std::move(message);
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
dr_status guarded(F&& body) noexcept {
  try {
    last_error.clear();
    body();
    return DR_OK;
  } catch (const FormatError& e) {
    return fail(DR_ERR_FORMAT, e.what());
  } catch (const BudgetError& e) {
    return fail(DR_ERR_BUDGET, e.what());
  } catch (const ParameterError& e) {
    return fail(DR_ERR_PARAM, e.what());
  } catch (const Json::parse_error& e) {
    return fail(DR_ERR_FORMAT, std::string("request is not valid JSON: ") + e.what());
  } catch (const Json::exception& e) {
    return fail(DR_ERR_PARAM, std::string("request: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(DR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DR_ERR_INTERNAL, "unknown error");
  }
}

void fill(dr_buffer* out, const void* data, std::size_t size) {
  auto* p = static_cast<std::uint8_t*>(std::malloc(size + 1));
  if (!p) throw std::bad_alloc();
  if (size) std::memcpy(p, data, size);
  p[size] = 0;
  out->data = p;
  out->size = size;
}

void fill(dr_buffer* out, const std::string& s) { fill(out, s.data(), s.size()); }

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

Json parse_request(const char* request) {
  require(request != nullptr, "request is null");
  Json doc = Json::parse(request);
  require(doc.is_object(), "request must be a JSON object");
  return doc;
}

template <typename T>
T get(const Json& doc, const char* name) {
  if (!doc.contains(name)) throw ParameterError(std::string("missing field '") + name + "'");
  try {
    return doc.at(name).get<T>();
  } catch (const Json::exception&) {
    throw ParameterError(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T get_or(const Json& doc, const char* name, T fallback) {
  return doc.contains(name) ? get<T>(doc, name) : fallback;
}

std::vector<double> q_list(const Json& doc) {
  const Json& q = doc.at("q");
  if (q.is_number()) return {q.get<double>()};
  return get<std::vector<double>>(doc, "q");
}

Horizon horizon_field(const Json& doc, const char* name) {
  if (!doc.contains(name)) return kInfinite;
  try {
    return horizon_from_json(doc.at(name));
  } catch (const ParameterError&) {
    throw ParameterError(std::string("field '") + name + "' must be a non-negative integer or \"inf\"");
  }
}

template <typename Report>
void emit(const Report& r, dr_format format, dr_buffer* out) {
  require(out != nullptr, "output buffer is null");
  if (format == DR_FORMAT_JSON) {
    fill(out, to_json(r).dump(2) + "\n");
  } else if (format == DR_FORMAT_CSV) {
    if constexpr (requires { to_csv(r); }) {
      fill(out, to_csv(r));
    } else {
      throw ParameterError("CSV output is not available for this report");
    }
  } else {
    throw ParameterError("text output is only available for bounds");
  }
}

}  // namespace

extern "C" {

void dr_buffer_free(dr_buffer* buf) {
  if (!buf) return;
  std::free(buf->data);
  buf->data = nullptr;
  buf->size = 0;
}

const char* dr_last_error(void) { return last_error.c_str(); }

const char* dr_version(void) { return DECAYRANK_VERSION; }

dr_status dr_half_life_to_alpha(double half_life, double* alpha) {
  return guarded([&] {
    require(alpha != nullptr, "alpha is null");
    *alpha = half_life_to_alpha(half_life);
  });
}

dr_status dr_ranker_create(double alpha, dr_ranker** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new dr_ranker{DecayRankTable(DecayParams::from_alpha(alpha))};
  });
}

dr_status dr_ranker_create_uniform(double alpha, const char* const* items, size_t count, dr_ranker** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(items != nullptr || count == 0, "items is null");
    std::vector<std::string> ids;
    ids.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(items[i] != nullptr, "item id is null");
      ids.emplace_back(items[i]);
    }
    *out = new dr_ranker{DecayRankTable(DecayParams::from_alpha(alpha), ids)};
  });
}

void dr_ranker_destroy(dr_ranker* ranker) { delete ranker; }

dr_status dr_ranker_observe(dr_ranker* ranker, const char* item, size_t length) {
  return guarded([&] {
    require(ranker != nullptr && item != nullptr, "null argument");
    ranker->table.observe(std::string_view(item, length));
  });
}

dr_status dr_ranker_set_alpha(dr_ranker* ranker, double alpha) {
  return guarded([&] {
    require(ranker != nullptr, "ranker is null");
    ranker->table.set_alpha(alpha);
  });
}

dr_status dr_ranker_set_eviction_floor(dr_ranker* ranker, double floor) {
  return guarded([&] {
    require(ranker != nullptr, "ranker is null");
    ranker->table.set_eviction_floor(floor);
  });
}

dr_status dr_ranker_probability(const dr_ranker* ranker, const char* item, size_t length, double* out) {
  return guarded([&] {
    require(ranker != nullptr && item != nullptr && out != nullptr, "null argument");
    *out = ranker->table.probability(std::string_view(item, length));
  });
}

dr_status dr_ranker_step(const dr_ranker* ranker, uint64_t* out) {
  return guarded([&] {
    require(ranker != nullptr && out != nullptr, "null argument");
    *out = ranker->table.global_step();
  });
}

dr_status dr_ranker_size(const dr_ranker* ranker, size_t* out) {
  return guarded([&] {
    require(ranker != nullptr && out != nullptr, "null argument");
    *out = ranker->table.size();
  });
}

dr_status dr_ranker_alpha(const dr_ranker* ranker, double* out) {
  return guarded([&] {
    require(ranker != nullptr && out != nullptr, "null argument");
    *out = ranker->table.params().alpha;
  });
}

dr_status dr_ranker_report(const dr_ranker* ranker, size_t k, dr_format format, int csv_header, dr_buffer* out) {
  return guarded([&] {
    require(ranker != nullptr && out != nullptr, "null argument");
    RankReport r{ranker->table.global_step(), ranker->table.top_k(k)};
    if (format == DR_FORMAT_JSON) {
      fill(out, to_json(r).dump());
    } else if (format == DR_FORMAT_CSV) {
      fill(out, to_csv(r, csv_header != 0));
    } else {
      throw ParameterError("text output is only available for bounds");
    }
  });
}

dr_status dr_ranker_snapshot(const dr_ranker* ranker, dr_buffer* out) {
  return guarded([&] {
    require(ranker != nullptr && out != nullptr, "null argument");
    const auto bytes = ranker->table.snapshot();
    fill(out, bytes.data(), bytes.size());
  });
}

dr_status dr_ranker_restore(const uint8_t* bytes, size_t size, dr_ranker** out) {
  return guarded([&] {
    require(out != nullptr && (bytes != nullptr || size == 0), "null argument");
    *out = new dr_ranker{DecayRankTable::restore(std::span<const std::uint8_t>(bytes, size))};
  });
}

dr_status dr_simulate(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] { emit(run_walk(walk_config_from_json(parse_request(request_json))), format, out); });
}

dr_status dr_enumerate(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    Json doc = parse_request(request_json);
    const int order = get_or<int>(doc, "order", 2);
    doc.erase("order");
    emit(enumerate_exact(walk_config_from_json(doc), order), format, out);
  });
}

dr_status dr_probe(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] { emit(reciprocal_probe(walk_config_from_json(parse_request(request_json))), format, out); });
}

dr_status dr_moments(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    const Json doc = parse_request(request_json);
    const double alpha = get<double>(doc, "alpha");
    const auto qs = q_list(doc);
    require(qs.size() == 1, "field 'q' must be a single probability");
    const double q = qs[0];
    const int order = get_or<int>(doc, "order", 4);
    const auto table = central_moments(alpha, q, order);
    if (format == DR_FORMAT_CSV) {
      fill(out, to_csv(table));
      return;
    }
    require(format == DR_FORMAT_JSON, "text output is only available for bounds");
    Json j = to_json(table);
    j["variance"] = to_json(scalar_mean_var(alpha, q, kInfinite, 0.0));
    j["symmetry"] = to_json(moment_symmetry_check(alpha, q, order));
    // The root trend is stated for q <= 1/2; the reflection covers the rest.
    if (order >= 2) j["root_trend"] = to_json(moment_root_trend(alpha, q <= 0.5 ? q : 1.0 - q, order));
    require(out != nullptr, "output buffer is null");
    fill(out, j.dump(2) + "\n");
  });
}

dr_status dr_generalized(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    Json doc = parse_request(request_json);
    const Horizon t = horizon_field(doc, "steps");
    if (!t) doc.erase("steps");
    const bool has_y0 = doc.contains("y0");
    const WalkConfig cfg = walk_config_from_json(doc);
    const std::vector<double> y0 = (t || has_y0) ? cfg.y0 : std::vector<double>{};
    emit(generalized_moments(cfg.vertices, cfg.q, cfg.alpha, t, y0), format, out);
  });
}

dr_status dr_eigen(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    const Json doc = parse_request(request_json);
    if (doc.contains("alpha")) {
      emit(simplex_covariance(get<double>(doc, "alpha"), q_list(doc), horizon_field(doc, "t")), format, out);
      return;
    }
    // Without alpha only the kernel diag(Q) - QQ^T is defined.
    const auto q = q_list(doc);
    const auto spec = kernel_spectrum(q);
    require(out != nullptr, "output buffer is null");
    if (format == DR_FORMAT_CSV) {
      std::string csv = "quantity,i,j,value\n";
      char buf[40];
      for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
        const auto res = std::to_chars(buf, buf + sizeof buf, spec.eigenvalues[i]);
        csv += "kernel_eigenvalue," + std::to_string(i) + ",," + std::string(buf, res.ptr) + "\n";
      }
      fill(out, csv);
      return;
    }
    require(format == DR_FORMAT_JSON, "text output is only available for bounds");
    Json pairs = Json::array();
    for (const auto& p : spec.nonzero) pairs.push_back({{"value", p.value}, {"vector", p.vector}});
    const Json j = {{"kind", "kernel_spectrum"}, {"q", q}, {"eigenvalues", spec.eigenvalues}, {"nonzero", pairs}};
    fill(out, j.dump(2) + "\n");
  });
}

dr_status dr_bounds(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    const Json doc = parse_request(request_json);
    const auto report = tail_bound({get<double>(doc, "alpha"), q_list(doc), get<double>(doc, "eps"), horizon_field(doc, "t")});
    if (format == DR_FORMAT_TEXT) {
      require(out != nullptr, "output buffer is null");
      fill(out, render_text(report));
    } else {
      emit(report, format, out);
    }
  });
}

dr_status dr_boost(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    const Json doc = parse_request(request_json);
    emit(boost_ratio(get<double>(doc, "alpha"), get<std::uint64_t>(doc, "t1"), get<std::uint64_t>(doc, "t2")), format, out);
  });
}

dr_status dr_regime(const char* request_json, dr_format format, dr_buffer* out) {
  return guarded([&] {
    const Json doc = parse_request(request_json);
    RegimeSwitchSpec spec{get<std::vector<double>>(doc, "x"),  get<std::vector<double>>(doc, "p1"),
                          get<std::vector<double>>(doc, "p2"), get<std::uint64_t>(doc, "t1"),
                          get<std::uint64_t>(doc, "t2"),       get<double>(doc, "alpha")};
    emit(regime_switch_mean(spec), format, out);
  });
}

dr_status dr_verify(int full, dr_check_callback callback, void* user, int* all_passed) {
  return guarded([&] {
    const auto results = run_acceptance(full ? VerifyBudget::full : VerifyBudget::quick, [&](const CheckResult& r) {
      if (!callback) return;
      const dr_check c{r.criterion, r.name.c_str(), r.passed ? 1 : 0, r.residual, r.tolerance, r.detail.c_str(), r.seconds};
      callback(&c, user);
    });
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
