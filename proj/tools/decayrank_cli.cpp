// decayrank command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "decayrank/decayrank.h"

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kVerifyFailed = 3 };

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage(std::string msg) { throw Failure{kUsage, std::move(msg)}; }
[[noreturn]] void io(std::string msg) { throw Failure{kIo, std::move(msg)}; }

// Library messages describe quantities by name; map them back to the flag
// the user typed.
std::string flag_for(const std::string& message) {
  static const std::pair<const char*, const char*> kNames[] = {
      {"half-life", "--half-life"}, {"alpha", "--alpha"}, {"epsilon", "--eps"}, {"eps", "--eps"},
      {"y0", "--y0"},               {"t1", "--t1"},       {"t2", "--t2"},       {"steps", "--steps"},
      {"paths", "--paths"},         {"order", "--order"}, {"k", "--k"},         {"item", "--items"},
      {"Q", "--q"},                 {"q", "--q"},         {"q_i", "--q"},       {"t", "--steps"},
      {"X", "--x"},                 {"P1", "--p1"},       {"P2", "--p2"},       {"vertices", "--config"},
  };
  for (const auto& [name, flag] : kNames) {
    const std::regex word(std::string("(^|[^A-Za-z0-9_-])'?") + name + "'?([^A-Za-z0-9_-]|$)");
    if (std::regex_search(message, word)) return flag;
  }
  return {};
}

void check(dr_status status) {
  if (status == DR_OK) return;
  const std::string msg = dr_last_error();
  switch (status) {
    case DR_ERR_IO:
      io(msg);
    case DR_ERR_FORMAT:
      io("malformed input: " + msg);
    case DR_ERR_PARAM:
    case DR_ERR_BUDGET: {
      const std::string flag = flag_for(msg);
      usage(flag.empty() ? msg : "invalid " + flag + ": " + msg);
    }
    default:
      throw Failure{kIo, "internal error: " + msg};
  }
}

class Buffer {
 public:
  Buffer() = default;
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  ~Buffer() { dr_buffer_free(&buf_); }
  dr_buffer* get() { return &buf_; }
  std::string str() const { return buf_.data ? std::string(reinterpret_cast<const char*>(buf_.data), buf_.size) : ""; }
  std::vector<std::uint8_t> bytes() const { return {buf_.data, buf_.data + buf_.size}; }

 private:
  dr_buffer buf_{nullptr, 0};
};

class Ranker {
 public:
  explicit Ranker(dr_ranker* r) : r_(r) {}
  Ranker(const Ranker&) = delete;
  Ranker& operator=(const Ranker&) = delete;
  ~Ranker() { dr_ranker_destroy(r_); }
  dr_ranker* get() const { return r_; }

 private:
  dr_ranker* r_;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      usage(std::string("invalid ") + flag + ": '" + tok + "' is not a number");
    }
  }
  if (out.empty()) usage(std::string("invalid ") + flag + ": empty list");
  return out;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) usage("invalid --items: empty item id");
    out.push_back(tok);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io("cannot open '" + path + "'");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) io("cannot read '" + path + "'");
  return data;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())) || !out.flush()) {
    io("cannot write '" + path + "'");
  }
}

// Options shared by every subcommand.
struct Common {
  std::string format = "json";
  std::string output;
  bool stamp = false;
};

dr_format format_of(const std::string& name) {
  if (name == "json") return DR_FORMAT_JSON;
  if (name == "csv") return DR_FORMAT_CSV;
  return DR_FORMAT_TEXT;
}

class Sink {
 public:
  explicit Sink(const Common& c) : path_(c.output) {}
  void write(const std::string& s) { text_ += s; }
  void finish() {
    if (path_.empty() || path_ == "-") {
      std::cout << text_;
      std::cout.flush();
      if (!std::cout) io("cannot write to standard output");
    } else {
      write_file(path_, text_);
    }
  }

 private:
  std::string path_;
  std::string text_;
};

Json manifest(const std::string& subcommand, const Json& parameters, const Common& c) {
  Json m;
  m["tool"] = "decayrank";
  m["version"] = dr_version();
  m["subcommand"] = subcommand;
  m["parameters"] = parameters;
  if (parameters.contains("seed")) m["seed"] = parameters["seed"];
  // Wall-clock stamps break bit-identical reruns, so they are opt-in.
  if (c.stamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["timestamp"] = buf;
  }
  return m;
}

// CSV outputs carry the manifest as a leading comment line.
std::string csv_manifest(const Json& m) { return "# manifest " + m.dump() + "\n"; }

using ReportFn = dr_status (*)(const char*, dr_format, dr_buffer*);

void run_report(const std::string& subcommand, ReportFn fn, const Json& request, const Common& c) {
  const Json m = manifest(subcommand, request, c);
  const dr_format fmt = format_of(c.format);
  Buffer buf;
  check(fn(request.dump().c_str(), fmt, buf.get()));
  Sink sink(c);
  if (fmt == DR_FORMAT_JSON) {
    Json doc;
    doc["manifest"] = m;
    doc["report"] = Json::parse(buf.str());
    sink.write(doc.dump(2) + "\n");
  } else if (fmt == DR_FORMAT_CSV) {
    sink.write(csv_manifest(m) + buf.str());
  } else {
    sink.write(buf.str());
  }
  sink.finish();
}

std::optional<double> resolve_alpha(const std::optional<double>& alpha, const std::optional<double>& half_life,
                                    bool required) {
  if (alpha && half_life) usage("give exactly one of --alpha and --half-life");
  if (half_life) {
    double a = 0.0;
    check(dr_half_life_to_alpha(*half_life, &a));
    return a;
  }
  if (!alpha && required) usage("give exactly one of --alpha and --half-life");
  return alpha;
}

Json horizon(const std::optional<std::uint64_t>& steps) { return steps ? Json(*steps) : Json("inf"); }

// ---------------------------------------------------------------------------
// rank

struct RankArgs {
  std::optional<double> alpha, half_life;
  std::string items;
  std::size_t k = 10;
  std::uint64_t every = 0;
  std::string input = "-";
  std::string save_snapshot, resume;
  double eviction_floor = 0.0;
};

int cmd_rank(const RankArgs& a, const Common& c) {
  if (c.format == "text") usage("invalid --format: rank supports json and csv");
  if (a.k == 0) usage("invalid --k: must be at least 1");
  const auto alpha = resolve_alpha(a.alpha, a.half_life, a.resume.empty());

  dr_ranker* raw = nullptr;
  if (!a.resume.empty()) {
    if (!a.items.empty()) usage("--items cannot be combined with --resume");
    const std::string bytes = read_file(a.resume);
    check(dr_ranker_restore(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size(), &raw));
  } else if (!a.items.empty()) {
    const auto ids = split_ids(a.items);
    std::vector<const char*> ptrs;
    for (const auto& id : ids) ptrs.push_back(id.c_str());
    check(dr_ranker_create_uniform(*alpha, ptrs.data(), ptrs.size(), &raw));
  } else {
    check(dr_ranker_create(*alpha, &raw));
  }
  Ranker ranker(raw);
  if (alpha) check(dr_ranker_set_alpha(ranker.get(), *alpha));
  if (a.eviction_floor > 0.0) check(dr_ranker_set_eviction_floor(ranker.get(), a.eviction_floor));

  double effective_alpha = 0.0;
  check(dr_ranker_alpha(ranker.get(), &effective_alpha));
  Json params;
  params["alpha"] = effective_alpha;
  if (a.half_life) params["half_life"] = *a.half_life;
  params["k"] = a.k;
  params["snapshot_every"] = a.every;
  params["items"] = a.items;
  params["input"] = a.input;
  params["resume"] = a.resume;
  if (a.eviction_floor > 0.0) params["eviction_floor"] = a.eviction_floor;
  const Json m = manifest("rank", params, c);

  const bool csv = c.format == "csv";
  Json reports = Json::array();
  std::string csv_rows;
  bool header = true;
  std::uint64_t last_reported = UINT64_MAX;
  auto report = [&] {
    std::uint64_t step = 0;
    check(dr_ranker_step(ranker.get(), &step));
    if (step == last_reported) return;
    last_reported = step;
    Buffer buf;
    check(dr_ranker_report(ranker.get(), a.k, csv ? DR_FORMAT_CSV : DR_FORMAT_JSON, header ? 1 : 0, buf.get()));
    header = false;
    if (csv) {
      csv_rows += buf.str();
    } else {
      reports.push_back(Json::parse(buf.str()));
    }
  };

  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file.open(a.input, std::ios::binary);
    if (!file) io("cannot open '" + a.input + "'");
    in = &file;
  }
  std::string line;
  while (std::getline(*in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    check(dr_ranker_observe(ranker.get(), line.data() + first, last - first + 1));
    if (a.every > 0) {
      std::uint64_t step = 0;
      check(dr_ranker_step(ranker.get(), &step));
      if (step % a.every == 0) report();
    }
  }
  if (in->bad()) io("error reading '" + a.input + "'");
  report();

  if (!a.save_snapshot.empty()) {
    Buffer snap;
    check(dr_ranker_snapshot(ranker.get(), snap.get()));
    write_file(a.save_snapshot, snap.str());
  }

  Sink sink(c);
  if (csv) {
    sink.write(csv_manifest(m) + csv_rows);
  } else {
    Json doc;
    doc["manifest"] = m;
    doc["reports"] = reports;
    sink.write(doc.dump(2) + "\n");
  }
  sink.finish();
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::optional<double> alpha, half_life;
  std::string q, y0, mode = "simplex", config;
  std::optional<std::uint64_t> steps;
  std::uint64_t paths = 10000, seed = 0;
  int order = 0;
  bool exact = false, probe = false;
};

constexpr double kDefaultWalkAlpha = 0.9;

int cmd_simulate(const SimulateArgs& a, const Common& c) {
  if (c.format == "text") usage("invalid --format: simulate supports json and csv");
  if (a.exact && a.probe) usage("--exact and --probe are mutually exclusive");
  Json request;
  if (!a.config.empty()) {
    try {
      request = Json::parse(read_file(a.config));
    } catch (const Json::parse_error& e) {
      usage(std::string("invalid --config: ") + e.what());
    }
    if (!request.is_object()) usage("invalid --config: expected a JSON object");
  } else {
    if (a.mode != "simplex") usage("invalid --mode: '" + a.mode + "' walks need --config with vertex coordinates");
    if (a.q.empty()) usage("--q is required");
    const auto alpha = resolve_alpha(a.alpha, a.half_life, false).value_or(kDefaultWalkAlpha);
    auto q = parse_list(a.q, "--q");
    // A single value is the two-vertex walk (q, 1 - q).
    if (q.size() == 1) q.push_back(1.0 - q[0]);
    request["mode"] = "simplex";
    request["alpha"] = alpha;
    request["q"] = q;
    if (!a.y0.empty()) {
      auto y0 = parse_list(a.y0, "--y0");
      if (y0.size() == 1) y0.push_back(1.0 - y0[0]);
      request["y0"] = y0;
    }
    if (a.steps) {
      request["steps"] = *a.steps;
    } else {
      // Long enough that alpha^steps < 1e-9.
      const double steps = std::ceil(std::log(1e-9) / std::log(alpha));
      request["steps"] = static_cast<std::uint64_t>(std::min(steps, 1e6));
    }
    request["paths"] = a.paths;
    request["seed"] = a.seed;
    if (a.order > 0) request["moment_order"] = a.order;
  }
  if (a.exact) {
    Json r = request;
    if (a.order > 0) r["order"] = a.order;
    r.erase("moment_order");
    r.erase("paths");
    run_report("simulate", dr_enumerate, r, c);
  } else if (a.probe) {
    run_report("simulate", dr_probe, request, c);
  } else {
    run_report("simulate", dr_simulate, request, c);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// analytics and bounds

struct AnalyticArgs {
  std::optional<double> alpha, half_life, eps;
  std::string q, config, x, p1, p2;
  std::optional<std::uint64_t> steps, t1, t2;
  int order = 4;
};

int cmd_moments(const AnalyticArgs& a, const Common& c) {
  if (c.format == "text") usage("invalid --format: moments supports json and csv");
  if (!a.config.empty()) {
    Json request;
    try {
      request = Json::parse(read_file(a.config));
    } catch (const Json::parse_error& e) {
      usage(std::string("invalid --config: ") + e.what());
    }
    if (a.steps) request["steps"] = *a.steps;
    run_report("moments", dr_generalized, request, c);
    return kOk;
  }
  if (a.q.empty()) usage("--q is required");
  const auto q = parse_list(a.q, "--q");
  if (q.size() != 1) usage("invalid --q: moments takes a single probability");
  Json request;
  request["alpha"] = *resolve_alpha(a.alpha, a.half_life, true);
  request["q"] = q[0];
  request["order"] = a.order;
  run_report("moments", dr_moments, request, c);
  return kOk;
}

int cmd_eigen(const AnalyticArgs& a, const Common& c) {
  if (c.format == "text") usage("invalid --format: eigen supports json and csv");
  if (a.q.empty()) usage("--q is required");
  Json request;
  request["q"] = parse_list(a.q, "--q");
  if (const auto alpha = resolve_alpha(a.alpha, a.half_life, false)) {
    request["alpha"] = *alpha;
    request["t"] = horizon(a.steps);
  }
  run_report("eigen", dr_eigen, request, c);
  return kOk;
}

int cmd_bounds(const AnalyticArgs& a, const Common& c) {
  if (a.q.empty()) usage("--q is required");
  if (!a.eps) usage("--eps is required");
  Json request;
  request["alpha"] = *resolve_alpha(a.alpha, a.half_life, true);
  request["q"] = parse_list(a.q, "--q");
  request["eps"] = *a.eps;
  request["t"] = horizon(a.steps);
  if (c.format == "text") {
    Buffer buf;
    check(dr_bounds(request.dump().c_str(), DR_FORMAT_TEXT, buf.get()));
    Sink sink(c);
    sink.write(buf.str());
    sink.finish();
    return kOk;
  }
  run_report("bounds", dr_bounds, request, c);
  return kOk;
}

int cmd_boost(const AnalyticArgs& a, const Common& c) {
  if (c.format == "text") usage("invalid --format: boost supports json and csv");
  if (!a.t1 || !a.t2) usage("--t1 and --t2 are required");
  Json request;
  request["alpha"] = *resolve_alpha(a.alpha, a.half_life, true);
  request["t1"] = *a.t1;
  request["t2"] = *a.t2;
  run_report("boost", dr_boost, request, c);
  return kOk;
}

int cmd_regime(const AnalyticArgs& a, const Common& c) {
  if (c.format != "json") usage("invalid --format: regime supports json only");
  if (!a.t1 || !a.t2) usage("--t1 and --t2 are required");
  if (a.x.empty() || a.p1.empty() || a.p2.empty()) usage("--x, --p1 and --p2 are required");
  Json request;
  request["alpha"] = *resolve_alpha(a.alpha, a.half_life, true);
  request["x"] = parse_list(a.x, "--x");
  request["p1"] = parse_list(a.p1, "--p1");
  request["p2"] = parse_list(a.p2, "--p2");
  request["t1"] = *a.t1;
  request["t2"] = *a.t2;
  run_report("regime", dr_regime, request, c);
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyState {
  bool json = false;
  Json checks = Json::array();
};

void on_check(const dr_check* check, void* user) {
  auto* state = static_cast<VerifyState*>(user);
  if (state->json) {
    Json j;
    j["criterion"] = check->criterion;
    j["name"] = check->name;
    j["passed"] = check->passed != 0;
    j["residual"] = check->residual;
    j["tolerance"] = check->tolerance;
    j["detail"] = check->detail;
    j["seconds"] = check->seconds;
    state->checks.push_back(std::move(j));
    return;
  }
  std::printf("[%s] %2d %-40s residual=%.3e tol=%.1e (%.1fs) %s\n", check->passed ? "pass" : "FAIL", check->criterion,
              check->name, check->residual, check->tolerance, check->seconds, check->detail);
  std::fflush(stdout);
}

int cmd_verify(bool full, const Common& c) {
  if (c.format == "csv") usage("invalid --format: verify supports text and json");
  VerifyState state;
  state.json = c.format == "json" && !c.output.empty();
  int all_passed = 0;
  check(dr_verify(full ? 1 : 0, on_check, &state, &all_passed));
  if (state.json) {
    Json params;
    params["budget"] = full ? "full" : "quick";
    Json doc;
    doc["manifest"] = manifest("verify", params, c);
    doc["checks"] = state.checks;
    doc["all_passed"] = all_passed != 0;
    Sink sink(c);
    sink.write(doc.dump(2) + "\n");
    sink.finish();
  } else {
    std::printf("%s\n", all_passed ? "all checks passed" : "some checks FAILED");
  }
  return all_passed ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-decay heavy-hitter ranking, random-walk simulation and moment analytics"};
  app.set_version_flag("--version", std::string(dr_version()));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, const std::vector<std::string>& formats) {
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
    sub->add_option("--output,-o", common.output, "Write to this file instead of standard output");
    sub->add_flag("--stamp", common.stamp, "Record a wall-clock timestamp in the manifest");
  };

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank items of an event stream (one id per line)");
  rank_cmd->add_option("--alpha", rank.alpha, "Decay factor in (0, 1)");
  rank_cmd->add_option("--half-life", rank.half_life, "Half-life in events");
  rank_cmd->add_option("--items", rank.items, "Comma-separated ids for a uniform start");
  rank_cmd->add_option("--k", rank.k, "Report size")->capture_default_str();
  rank_cmd->add_option("--snapshot-every", rank.every, "Report every N events (0: only at the end)");
  rank_cmd->add_option("--save-snapshot", rank.save_snapshot, "Write the final table to this file");
  rank_cmd->add_option("--resume", rank.resume, "Start from a saved table");
  rank_cmd->add_option("--eviction-floor", rank.eviction_floor, "Drop items below this probability at rebase");
  rank_cmd->add_option("input", rank.input, "Event file ('-' for standard input)")->capture_default_str();
  add_common(rank_cmd, {"json", "csv"});

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo or exact random-walk statistics");
  sim_cmd->add_option("--alpha", sim.alpha, "Decay factor (default 0.9)");
  sim_cmd->add_option("--half-life", sim.half_life, "Half-life in events");
  sim_cmd->add_option("--q", sim.q, "Comma-separated vertex probabilities; one value means (q, 1 - q)");
  sim_cmd->add_option("--y0", sim.y0, "Start point (default: q)");
  sim_cmd->add_option("--mode", sim.mode, "Vertex mode; real and complex walks need --config")->capture_default_str();
  sim_cmd->add_option("--config", sim.config, "Walk configuration JSON file");
  sim_cmd->add_option("--steps", sim.steps, "Steps per path (default: until alpha^t < 1e-9)");
  sim_cmd->add_option("--paths", sim.paths, "Number of paths")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  sim_cmd->add_option("--order", sim.order, "Central moments of coordinate 0 up to this order");
  sim_cmd->add_flag("--exact", sim.exact, "Enumerate every jump sequence instead of sampling");
  sim_cmd->add_flag("--probe", sim.probe, "Estimate E[1/y_t] for a two-vertex walk");
  add_common(sim_cmd, {"json", "csv"});

  AnalyticArgs an;
  auto add_alpha = [&](CLI::App* sub) {
    sub->add_option("--alpha", an.alpha, "Decay factor in (0, 1)");
    sub->add_option("--half-life", an.half_life, "Half-life in events");
  };

  auto* moments_cmd = app.add_subcommand("moments", "Central moments of the limiting convolution");
  add_alpha(moments_cmd);
  moments_cmd->add_option("--q", an.q, "Probability of the jump to 1");
  moments_cmd->add_option("--order", an.order, "Highest moment order")->capture_default_str();
  moments_cmd->add_option("--config", an.config, "Walk configuration: closed-form mean and covariance instead");
  moments_cmd->add_option("--steps", an.steps, "Horizon for --config");
  add_common(moments_cmd, {"json", "csv"});

  auto* eigen_cmd = app.add_subcommand("eigen", "Covariance kernel and its spectrum");
  add_alpha(eigen_cmd);
  eigen_cmd->add_option("--q", an.q, "Comma-separated probability vector");
  eigen_cmd->add_option("--steps", an.steps, "Horizon (default infinite)");
  add_common(eigen_cmd, {"json", "csv"});

  auto* bounds_cmd = app.add_subcommand("bounds", "Chebyshev tail bounds");
  add_alpha(bounds_cmd);
  bounds_cmd->add_option("--q", an.q, "Comma-separated probabilities");
  bounds_cmd->add_option("--eps", an.eps, "Deviation");
  bounds_cmd->add_option("--steps", an.steps, "Horizon (default infinite)");
  add_common(bounds_cmd, {"json", "csv", "text"});

  auto* boost_cmd = app.add_subcommand("boost", "Recency boost of a newly popular item");
  add_alpha(boost_cmd);
  boost_cmd->add_option("--t1", an.t1, "Events before the switch");
  boost_cmd->add_option("--t2", an.t2, "Events after the switch");
  add_common(boost_cmd, {"json", "csv"});

  auto* regime_cmd = app.add_subcommand("regime", "Expected estimate after a change of incoming distribution");
  add_alpha(regime_cmd);
  regime_cmd->add_option("--x", an.x, "Estimate at the start");
  regime_cmd->add_option("--p1", an.p1, "Distribution of the first t1 events");
  regime_cmd->add_option("--p2", an.p2, "Distribution of the last t2 events");
  regime_cmd->add_option("--t1", an.t1, "Events under p1");
  regime_cmd->add_option("--t2", an.t2, "Events under p2");
  add_common(regime_cmd, {"json"});

  bool full = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  auto* quick_flag = verify_cmd->add_flag("--quick", "Reduced budget (default)");
  verify_cmd->add_flag("--full", full, "Full budget")->excludes(quick_flag);
  verify_cmd->add_option("--format", common.format, "text, or json with --output")
      ->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--output,-o", common.output, "Write the JSON summary to this file");
  common.format = "json";

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank, common);
    if (*sim_cmd) return cmd_simulate(sim, common);
    if (*moments_cmd) return cmd_moments(an, common);
    if (*eigen_cmd) return cmd_eigen(an, common);
    if (*bounds_cmd) return cmd_bounds(an, common);
    if (*boost_cmd) return cmd_boost(an, common);
    if (*regime_cmd) return cmd_regime(an, common);
    if (*verify_cmd) {
      if (common.format == "json" && common.output.empty()) common.format = "text";
      return cmd_verify(full, common);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "decayrank: %s\n", f.message.c_str());
    return f.code;
  }
  return kUsage;
}
