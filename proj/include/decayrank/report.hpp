#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "decayrank/analytics.hpp"
#include "decayrank/bounds.hpp"
#include "decayrank/decay_ranker.hpp"
#include "decayrank/walk_sim.hpp"

// JSON and CSV renderings of every report. Analytics CSV uses one long
// format, `quantity,i,j,value`, with i/j empty where a quantity is scalar or
// a vector. Numbers are written with round-trip precision.
namespace decayrank {

using Json = nlohmann::json;

/// Parses the WalkConfig document described in the README. Throws
/// ParameterError naming the offending field.
WalkConfig walk_config_from_json(const Json& doc);
Json to_json(const WalkConfig& cfg);

Json to_json(const SampleStats& s);
Json to_json(const ExactMoments& m);
Json to_json(const ReciprocalProbeReport& r);
Json to_json(const ScalarMoments& m);
Json to_json(const CovarianceReport& r);
Json to_json(const GeneralizedMoments& g);
Json to_json(const CentralMomentTable& t);
Json to_json(const SymmetryReport& r);
Json to_json(const RootTrendReport& r);
Json to_json(const BoundReport& r);
Json to_json(const RegimeSwitchMean& r);
Json to_json(const BoostRatio& b);

std::string to_csv(const SampleStats& s);
std::string to_csv(const ExactMoments& m);
std::string to_csv(const ReciprocalProbeReport& r);
std::string to_csv(const CovarianceReport& r);
std::string to_csv(const CentralMomentTable& t);
std::string to_csv(const BoundReport& r);
std::string to_csv(const BoostRatio& b);

/// Plain-text rendering for terminals.
std::string render_text(const BoundReport& r);

/// Rounds to 12 significant digits (the precision of ranking output).
double round12(double x);

/// One ranking report: the step it was taken at and the top-k list.
struct RankReport {
  std::uint64_t step = 0;
  std::vector<RankedItem> top;
};

Json to_json(const RankReport& r);
/// Rows `step,rank,item,probability`; `header` controls the first line.
std::string to_csv(const RankReport& r, bool header);

/// Horizon as JSON: an integer or the string "inf".
Json horizon_to_json(Horizon t);
Horizon horizon_from_json(const Json& v);

}  // namespace decayrank
