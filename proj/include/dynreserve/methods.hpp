#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynreserve/execution.hpp"
#include "dynreserve/forecast_model.hpp"
#include "dynreserve/reserve_engine.hpp"
#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

enum class MethodId {
    deterministic,
    all_scenarios,
    extreme_scenarios,
    bounds,
    prediction_interval,
    hybrid,
    risk_based,
};

// Short names used on the command line and in file names:
// deterministic|all|extreme|bounds|pi|hybrid|risk.
std::string_view to_string(MethodId id);
MethodId parse_method(std::string_view text);

enum class MethodFamily { recursive, anticipative, hybrid };
MethodFamily family(MethodId id);

struct MethodResult {
    MethodId id = MethodId::deterministic;
    ReserveProfile profile;
    std::string provenance;
};

// Baseline: the reserve model evaluated on the central forecast only.
MethodResult method_deterministic(const ProbabilisticForecast& forecast, const ReserveModel& model,
                                  double ci);

// Expected requirement over all scenarios, each scenario looked up through the
// reserve model with its own explanatory series.
MethodResult method_all_scenarios(const ScenarioSet& set, const ReserveModel& model, double ci,
                                  Execution exec = Execution::parallel);

struct ExtremeSubsets {
    std::vector<std::size_t> up;    // scenario indices, ascending
    std::vector<std::size_t> down;  // scenario indices, ascending
    std::size_t d = 0;
    std::vector<double> scores;     // per scenario: sum of explanatory variable
};

// ceil(fraction * S), at least 1 and at most S.
std::size_t extreme_count(std::size_t scenarios, double fraction);

// For production variables the d lowest-score scenarios are the upward
// extremes and the d highest the downward ones; load/net demand flips this.
// Ties prefer the lower scenario index. Throws std::invalid_argument unless
// 1 <= d <= S.
ExtremeSubsets select_extremes(const ScenarioSet& set, std::size_t d,
                               ExplanatoryKind score_by = ExplanatoryKind::magnitude);

MethodResult method_extreme_scenarios(const ScenarioSet& set, const ExtremeSubsets& extremes,
                                      const ReserveModel& model, double ci,
                                      Execution exec = Execution::parallel);

// Reserves from the probability-weighted mean trajectory of each extreme
// subset, measured from the central forecast. Negative parts clamp to 0.
MethodResult method_bounds(const ScenarioSet& set, const ExtremeSubsets& extremes,
                           const ProbabilisticForecast& forecast);

enum class PiMode {
    relative,  // distance of the P_limit quantiles from the central forecast
    literal,   // the quantiles themselves: r_up = F^-1(1-P), r_dn = -F^-1(P)
};

// P_limit = (1 - pi) / 2. Throws std::invalid_argument unless 0 < pi < 1.
MethodResult method_prediction_interval(const ProbabilisticForecast& forecast, double pi,
                                        PiMode mode = PiMode::relative);

// Elementwise maximum; throws std::invalid_argument on an empty list or
// horizon mismatch.
MethodResult method_hybrid(std::span<const MethodResult> results);

}  // namespace dynreserve
