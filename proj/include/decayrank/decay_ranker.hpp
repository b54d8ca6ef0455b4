#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace decayrank {

/// exp(-ln 2 / T). Throws ParameterError when T is not a positive finite
/// number, or when T is so large that the result rounds to 1.
double half_life_to_alpha(double half_life);

/// Inverse of half_life_to_alpha: -ln 2 / ln(alpha).
double alpha_to_half_life(double alpha);

struct DecayParams {
  double alpha = 0.0;
  double half_life = 0.0;  // events until an idle item loses half its mass

  static DecayParams from_alpha(double alpha);
  static DecayParams from_half_life(double half_life);
};

struct RankedItem {
  std::string id;
  double probability = 0.0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

// Streaming ranker for the convex mixture update p <- alpha * p + (1 - alpha) * delta_item.
//
// Weights are stored lazily: the materialized probability of item i is
// u_i * alpha^(step - rebase_step). An event only touches the hit item's u
// and the step counter. When alpha^-(step - rebase_step) would exceed 2^500
// every u is multiplied through and the rebase point moves to the current
// step, so the O(n) sweep is amortized over at least 500 * ln 2 / -ln(alpha)
// events.
//
// Single writer. Const member functions do not mutate and may be called
// concurrently with each other.
class DecayRankTable {
 public:
  /// Empty table. The first observed item receives all of the mass.
  explicit DecayRankTable(DecayParams params);

  /// Uniform start over `items`. Duplicate ids are rejected.
  DecayRankTable(DecayParams params, std::span<const std::string> items);

  /// Explicit start distribution; values must be non-negative and sum to 1
  /// within 1e-9.
  DecayRankTable(DecayParams params, std::span<const std::pair<std::string, double>> initial);

  void observe(std::string_view item);

  /// Materializes the current distribution, then swaps alpha. A no-op when
  /// `alpha` equals the current value.
  void set_alpha(double alpha);

  /// Items whose materialized probability falls below `floor` are dropped at
  /// the next rebase. 0 disables eviction. Lossy: evicted mass is not
  /// redistributed.
  void set_eviction_floor(double floor);
  double eviction_floor() const noexcept { return eviction_floor_; }

  /// The k most probable items, descending, ties broken by ascending id.
  /// Returns every item when k exceeds the table size.
  std::vector<RankedItem> top_k(std::size_t k) const;

  /// Every item with its materialized probability, sorted by id.
  std::vector<RankedItem> distribution() const;

  /// 0 for unknown items.
  double probability(std::string_view item) const;

  /// Compensated sum of materialized probabilities.
  double total_mass() const;

  const DecayParams& params() const noexcept { return params_; }
  std::uint64_t global_step() const noexcept { return step_; }
  std::uint64_t rebase_step() const noexcept { return rebase_step_; }
  std::size_t size() const noexcept { return weights_.size(); }

  /// Raw lazy weight u_i (0 for unknown items).
  double raw_weight(std::string_view item) const;

  /// Versioned binary encoding; see README for the layout.
  std::vector<std::uint8_t> snapshot() const;
  static DecayRankTable restore(std::span<const std::uint8_t> bytes);

 private:
  struct IdHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  using WeightMap = std::unordered_map<std::string, double, IdHash, std::equal_to<>>;

  double scale() const;
  void rebase();
  void configure(DecayParams params);

  DecayParams params_;
  WeightMap weights_;
  std::uint64_t step_ = 0;
  std::uint64_t rebase_step_ = 0;
  std::uint64_t max_pending_ = 0;  // largest step - rebase_step before a rebase is forced
  double eviction_floor_ = 0.0;
  bool has_mass_ = false;
};

}  // namespace decayrank
