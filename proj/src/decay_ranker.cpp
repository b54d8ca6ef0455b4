#include "decayrank/decay_ranker.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "decayrank/error.hpp"
#include "numeric.hpp"

namespace decayrank {

namespace {

constexpr double kRebaseLog2 = 500.0;  // rebase before alpha^-pending exceeds 2^500
constexpr std::uint64_t kMaxPendingCap = std::uint64_t{1} << 62;

// Rounding in u * scale can overshoot 1 by an ulp.
double materialize(double u, double scale) { return std::min(1.0, u * scale); }

void require_alpha(double alpha) {
  if (!detail::in_open_unit_interval(alpha)) {
    throw ParameterError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

// ---------------------------------------------------------------------------
// Snapshot encoding: little-endian, length-prefixed, FNV-1a 64 trailer.

constexpr std::uint8_t kMagic[4] = {'D', 'R', 'N', 'K'};
constexpr std::uint32_t kSnapshotVersion = 1;

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  std::span<const std::uint8_t> view() const { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8(const char* field) { return take(field, 1)[0]; }
  std::uint32_t u32(const char* field) {
    auto b = take(field, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* field) {
    auto b = take(field, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
  }
  double f64(const char* field) { return std::bit_cast<double>(u64(field)); }
  std::string str(const char* field, std::size_t n) {
    auto b = take(field, n);
    return std::string(b.begin(), b.end());
  }
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> take(const char* field, std::size_t n) {
    if (remaining() < n) {
      throw FormatError(field, "truncated input (" + std::to_string(remaining()) +
                                   " bytes left, need " + std::to_string(n) + ")");
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

double half_life_to_alpha(double half_life) {
  if (!std::isfinite(half_life) || half_life <= 0.0) {
    throw ParameterError("half-life must be a positive finite number");
  }
  const double alpha = std::exp(-std::numbers::ln2 / half_life);
  if (!(alpha < 1.0) || !(alpha > 0.0)) {
    throw ParameterError("half-life " + std::to_string(half_life) +
                         " gives an alpha that is not representable inside (0, 1)");
  }
  return alpha;
}

double alpha_to_half_life(double alpha) {
  require_alpha(alpha);
  return -std::numbers::ln2 / std::log(alpha);
}

DecayParams DecayParams::from_alpha(double alpha) {
  return DecayParams{alpha, alpha_to_half_life(alpha)};
}

DecayParams DecayParams::from_half_life(double half_life) {
  return DecayParams{half_life_to_alpha(half_life), half_life};
}

// ---------------------------------------------------------------------------

DecayRankTable::DecayRankTable(DecayParams params) { configure(params); }

DecayRankTable::DecayRankTable(DecayParams params, std::span<const std::string> items) {
  configure(params);
  if (items.empty()) return;
  const double w = 1.0 / static_cast<double>(items.size());
  for (const auto& id : items) {
    if (!weights_.emplace(id, w).second) throw ParameterError("duplicate item id '" + id + "'");
  }
  has_mass_ = true;
}

DecayRankTable::DecayRankTable(DecayParams params,
                               std::span<const std::pair<std::string, double>> initial) {
  configure(params);
  if (initial.empty()) return;
  detail::CompensatedSum<double> sum;
  for (const auto& [id, p] : initial) {
    if (!std::isfinite(p) || p < 0.0) throw ParameterError("initial probability of '" + id + "' is invalid");
    if (!weights_.emplace(id, p).second) throw ParameterError("duplicate item id '" + id + "'");
    sum.add(p);
  }
  if (std::fabs(sum.value() - 1.0) > 1e-9) {
    throw ParameterError("initial distribution sums to " + std::to_string(sum.value()) + ", not 1");
  }
  has_mass_ = true;
}

void DecayRankTable::configure(DecayParams params) {
  require_alpha(params.alpha);
  params_ = DecayParams::from_alpha(params.alpha);
  const double limit = kRebaseLog2 * std::numbers::ln2 / -std::log(params_.alpha);
  max_pending_ = limit >= static_cast<double>(kMaxPendingCap)
                     ? kMaxPendingCap
                     : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(limit));
}

double DecayRankTable::scale() const {
  return std::pow(params_.alpha, static_cast<double>(step_ - rebase_step_));
}

void DecayRankTable::rebase() {
  if (step_ == rebase_step_) return;
  const double f = scale();
  for (auto it = weights_.begin(); it != weights_.end();) {
    double& u = it->second;
    u *= f;
    if (u < DBL_MIN) u = 0.0;  // no subnormals survive a rebase
    if (eviction_floor_ > 0.0 && u < eviction_floor_) {
      it = weights_.erase(it);
    } else {
      ++it;
    }
  }
  rebase_step_ = step_;
}

void DecayRankTable::observe(std::string_view item) {
  if (!has_mass_) {
    // Nothing to mix with: the first event carries all of the mass.
    ++step_;
    rebase_step_ = step_;
    weights_.try_emplace(std::string(item), 0.0).first->second = 1.0;
    has_mass_ = true;
    return;
  }
  if (step_ - rebase_step_ + 1 > max_pending_) rebase();
  ++step_;
  const double pending = static_cast<double>(step_ - rebase_step_);
  const double increment = (1.0 - params_.alpha) * std::pow(params_.alpha, -pending);
  auto it = weights_.find(item);
  if (it == weights_.end()) {
    weights_.emplace(std::string(item), increment);
  } else {
    it->second += increment;
  }
}

void DecayRankTable::set_alpha(double alpha) {
  require_alpha(alpha);
  if (alpha == params_.alpha) return;
  rebase();
  configure(DecayParams::from_alpha(alpha));
}

void DecayRankTable::set_eviction_floor(double floor) {
  if (!std::isfinite(floor) || floor < 0.0 || floor >= 1.0) {
    throw ParameterError("eviction floor must lie in [0, 1)");
  }
  eviction_floor_ = floor;
}

std::vector<RankedItem> DecayRankTable::top_k(std::size_t k) const {
  if (k == 0) throw ParameterError("k must be at least 1");
  std::vector<std::pair<const std::string*, double>> entries;
  entries.reserve(weights_.size());
  for (const auto& [id, u] : weights_) entries.emplace_back(&id, u);
  const auto by_rank = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return *a.first < *b.first;
  };
  const std::size_t n = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n), entries.end(),
                    by_rank);
  const double s = scale();
  std::vector<RankedItem> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({*entries[i].first, materialize(entries[i].second, s)});
  return out;
}

std::vector<RankedItem> DecayRankTable::distribution() const {
  const double s = scale();
  std::vector<RankedItem> out;
  out.reserve(weights_.size());
  for (const auto& [id, u] : weights_) out.push_back({id, materialize(u, s)});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

double DecayRankTable::probability(std::string_view item) const {
  auto it = weights_.find(item);
  return it == weights_.end() ? 0.0 : materialize(it->second, scale());
}

double DecayRankTable::raw_weight(std::string_view item) const {
  auto it = weights_.find(item);
  return it == weights_.end() ? 0.0 : it->second;
}

double DecayRankTable::total_mass() const {
  const double s = scale();
  detail::CompensatedSum<double> sum;
  for (const auto& [id, u] : weights_) sum.add(u * s);
  return sum.value();
}

// Layout (all integers little-endian):
//   magic "DRNK" | u32 version | f64 alpha | f64 half_life | f64 eviction_floor
//   | u64 global_step | u64 rebase_step | u8 has_mass | u64 item_count
//   | item_count x (u32 id_length, id bytes, f64 weight) | u64 fnv1a(all preceding bytes)
// Items are written in id order so equal tables encode to equal bytes.
std::vector<std::uint8_t> DecayRankTable::snapshot() const {
  Writer w;
  for (auto b : kMagic) w.u8(b);
  w.u32(kSnapshotVersion);
  w.f64(params_.alpha);
  w.f64(params_.half_life);
  w.f64(eviction_floor_);
  w.u64(step_);
  w.u64(rebase_step_);
  w.u8(has_mass_ ? 1 : 0);

  std::vector<std::pair<const std::string*, double>> entries;
  entries.reserve(weights_.size());
  for (const auto& [id, u] : weights_) entries.emplace_back(&id, u);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
  w.u64(entries.size());
  for (const auto& [id, u] : entries) {
    w.u32(static_cast<std::uint32_t>(id->size()));
    w.bytes(*id);
    w.f64(u);
  }
  w.u64(fnv1a(w.view()));
  return w.take();
}

DecayRankTable DecayRankTable::restore(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (auto b : kMagic) {
    if (r.u8("magic") != b) throw FormatError("magic", "not a decayrank snapshot");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kSnapshotVersion) {
    throw FormatError("version", "unsupported snapshot version " + std::to_string(version));
  }
  const double alpha = r.f64("alpha");
  if (!detail::in_open_unit_interval(alpha)) throw FormatError("alpha", "outside (0, 1)");
  const double half_life = r.f64("half_life");
  if (!std::isfinite(half_life) || std::fabs(std::exp(-std::numbers::ln2 / half_life) - alpha) > 1e-12) {
    throw FormatError("half_life", "inconsistent with alpha");
  }
  const double floor = r.f64("eviction_floor");
  if (!std::isfinite(floor) || floor < 0.0 || floor >= 1.0) throw FormatError("eviction_floor", "outside [0, 1)");
  const std::uint64_t step = r.u64("global_step");
  const std::uint64_t rebase_step = r.u64("rebase_step");
  if (rebase_step > step) throw FormatError("rebase_step", "exceeds global_step");
  const std::uint8_t has_mass = r.u8("has_mass");
  if (has_mass > 1) throw FormatError("has_mass", "not a boolean");
  const std::uint64_t count = r.u64("item_count");
  // Each item needs at least 12 bytes; reject absurd counts before allocating.
  if (count > r.remaining() / 12) throw FormatError("item_count", "larger than the remaining input");

  DecayRankTable table(DecayParams::from_alpha(alpha));
  table.eviction_floor_ = floor;
  table.step_ = step;
  table.rebase_step_ = rebase_step;
  table.has_mass_ = has_mass == 1;
  if (step - rebase_step > table.max_pending_) throw FormatError("rebase_step", "pending decay out of range");
  table.weights_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t len = r.u32("item_id_length");
    std::string id = r.str("item_id", len);
    const double u = r.f64("item_weight");
    if (!std::isfinite(u) || u < 0.0) throw FormatError("item_weight", "invalid weight for '" + id + "'");
    if (!table.weights_.emplace(std::move(id), u).second) throw FormatError("item_id", "duplicate id");
  }
  const std::size_t payload = r.offset();
  const std::uint64_t checksum = r.u64("checksum");
  if (checksum != fnv1a(bytes.first(payload))) throw FormatError("checksum", "mismatch");
  if (r.remaining() != 0) throw FormatError("checksum", "trailing bytes after snapshot");
  return table;
}

}  // namespace decayrank
