#include "dynreserve/methods.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynreserve/log.hpp"

namespace dynreserve {

std::string_view to_string(MethodId id) {
    switch (id) {
        case MethodId::deterministic: return "deterministic";
        case MethodId::all_scenarios: return "all";
        case MethodId::extreme_scenarios: return "extreme";
        case MethodId::bounds: return "bounds";
        case MethodId::prediction_interval: return "pi";
        case MethodId::hybrid: return "hybrid";
        case MethodId::risk_based: return "risk";
    }
    return "unknown";
}

MethodId parse_method(std::string_view text) {
    if (text == "deterministic") return MethodId::deterministic;
    if (text == "all") return MethodId::all_scenarios;
    if (text == "extreme") return MethodId::extreme_scenarios;
    if (text == "bounds") return MethodId::bounds;
    if (text == "pi") return MethodId::prediction_interval;
    if (text == "hybrid") return MethodId::hybrid;
    if (text == "risk") return MethodId::risk_based;
    throw std::invalid_argument("unknown method '" + std::string(text) +
                                "' (expected deterministic|all|extreme|bounds|pi|hybrid|risk)");
}

MethodFamily family(MethodId id) {
    switch (id) {
        case MethodId::bounds:
        case MethodId::prediction_interval: return MethodFamily::anticipative;
        case MethodId::hybrid: return MethodFamily::hybrid;
        default: return MethodFamily::recursive;
    }
}

namespace {

ReserveProfile scenario_requirements(const ScenarioSet& set, std::size_t s, const ReserveModel& model, double ci) {
    const auto& values = set.scenarios[s].values;
    const std::vector<double> nu = explanatory_series(values, set.grid, model.explanatory());
    return requirements(model, nu, ci, set.grid);
}

// Requirement profiles for the listed scenarios; slot s of the result is
// filled only when s is listed.
std::vector<ReserveProfile> per_scenario_requirements(const ScenarioSet& set, const std::vector<std::size_t>& which,
                                                      const ReserveModel& model, double ci, Execution exec) {
    std::vector<ReserveProfile> out(set.size());
    const std::size_t n = which.size();
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) out[which[i]] = scenario_requirements(set, which[i], model, ci);
    } else {
        for (std::size_t i = 0; i < n; ++i) out[which[i]] = scenario_requirements(set, which[i], model, ci);
    }
    return out;
}

// Probability-weighted mean over `which` (ascending), with the weights
// re-normalized over the subset. Accumulated as deviations from the first
// member so identical members reproduce that member exactly.
std::vector<double> weighted_mean(const ScenarioSet& set, const std::vector<std::size_t>& which,
                                  const std::vector<ReserveProfile>& profiles, Direction dir) {
    const auto& pivot = dir == Direction::up ? profiles[which.front()].up : profiles[which.front()].down;
    const std::size_t horizon = pivot.size();
    std::vector<double> acc(horizon, 0.0);
    double total = 0.0;
    for (std::size_t s : which) {
        const double pi = set.scenarios[s].probability;
        const auto& r = dir == Direction::up ? profiles[s].up : profiles[s].down;
        total += pi;
        for (std::size_t t = 0; t < horizon; ++t) acc[t] += pi * (r[t] - pivot[t]);
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("scenario subset has zero total probability");
    }
    std::vector<double> out(horizon);
    for (std::size_t t = 0; t < horizon; ++t) out[t] = std::max(pivot[t] + acc[t] / total, 0.0);
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

std::size_t clamp_negatives(std::vector<double>& v) {
    std::size_t count = 0;
    for (auto& x : v) {
        if (x < 0.0) {
            x = 0.0;
            ++count;
        }
    }
    return count;
}

void warn_clamped(std::string_view method, std::size_t count) {
    if (count > 0) {
        log::warn(std::string(method) + ": " + std::to_string(count) +
                  " negative reserve component(s) clamped to 0");
    }
}

std::string scenario_provenance(const ScenarioSet& set) {
    return "scenarios=" + std::to_string(set.size()) + " seed=" + std::to_string(set.seed) + " source=" +
           set.source_id;
}

}  // namespace

MethodResult method_deterministic(const ProbabilisticForecast& forecast, const ReserveModel& model, double ci) {
    const auto nu = explanatory_series(forecast.central().values(), forecast.grid(), model.explanatory());
    MethodResult out{MethodId::deterministic, requirements(model, nu, ci, forecast.grid()), "central forecast"};
    out.profile.method = "deterministic";
    return out;
}

MethodResult method_all_scenarios(const ScenarioSet& set, const ReserveModel& model, double ci, Execution exec) {
    if (set.scenarios.empty()) {
        throw std::invalid_argument("all-scenarios method needs at least one scenario");
    }
    const auto idx = all_indices(set.size());
    const auto profiles = per_scenario_requirements(set, idx, model, ci, exec);
    MethodResult out{MethodId::all_scenarios, zero_profile(set.grid, "all"), scenario_provenance(set)};
    out.profile.up = weighted_mean(set, idx, profiles, Direction::up);
    out.profile.down = weighted_mean(set, idx, profiles, Direction::down);
    out.profile.parameters["ci"] = ci;
    return out;
}

std::size_t extreme_count(std::size_t scenarios, double fraction) {
    if (scenarios == 0) return 0;
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("extreme fraction must lie in (0,1]");
    }
    const auto d = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(scenarios) - 1e-9));
    return std::clamp<std::size_t>(d, 1, scenarios);
}

ExtremeSubsets select_extremes(const ScenarioSet& set, std::size_t d, ExplanatoryKind score_by) {
    const std::size_t n = set.size();
    if (d < 1 || d > n) {
        throw std::invalid_argument("extreme subset size d=" + std::to_string(d) + " must lie in [1, " +
                                    std::to_string(n) + "]");
    }
    ExtremeSubsets ex;
    ex.d = d;
    ex.scores.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto nu = explanatory_series(set.scenarios[s].values, set.grid, score_by);
        ex.scores[s] = std::accumulate(nu.begin(), nu.end(), 0.0);
    }
    std::vector<std::size_t> low = all_indices(n);
    std::vector<std::size_t> high = low;
    std::stable_sort(low.begin(), low.end(), [&](std::size_t a, std::size_t b) { return ex.scores[a] < ex.scores[b]; });
    std::stable_sort(high.begin(), high.end(), [&](std::size_t a, std::size_t b) { return ex.scores[a] > ex.scores[b]; });
    low.resize(d);
    high.resize(d);
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    if (is_production(set.kind)) {
        ex.up = std::move(low);
        ex.down = std::move(high);
    } else {
        ex.up = std::move(high);
        ex.down = std::move(low);
    }
    return ex;
}

MethodResult method_extreme_scenarios(const ScenarioSet& set, const ExtremeSubsets& extremes,
                                      const ReserveModel& model, double ci, Execution exec) {
    if (extremes.up.empty() || extremes.down.empty()) {
        throw std::invalid_argument("extreme-scenarios method needs non-empty subsets");
    }
    std::vector<std::size_t> members;
    std::set_union(extremes.up.begin(), extremes.up.end(), extremes.down.begin(), extremes.down.end(),
                   std::back_inserter(members));
    const auto profiles = per_scenario_requirements(set, members, model, ci, exec);
    MethodResult out{MethodId::extreme_scenarios, zero_profile(set.grid, "extreme"),
                     scenario_provenance(set) + " d=" + std::to_string(extremes.d)};
    out.profile.up = weighted_mean(set, extremes.up, profiles, Direction::up);
    out.profile.down = weighted_mean(set, extremes.down, profiles, Direction::down);
    out.profile.parameters["ci"] = ci;
    out.profile.parameters["d"] = static_cast<double>(extremes.d);
    return out;
}

namespace {

std::vector<double> expected_trajectory(const ScenarioSet& set, const std::vector<std::size_t>& which) {
    std::vector<double> acc(set.horizon(), 0.0);
    double total = 0.0;
    for (std::size_t s : which) {
        const double pi = set.scenarios[s].probability;
        total += pi;
        for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += pi * set.scenarios[s].values[t];
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("scenario subset has zero total probability");
    }
    for (auto& v : acc) v /= total;
    return acc;
}

}  // namespace

MethodResult method_bounds(const ScenarioSet& set, const ExtremeSubsets& extremes,
                           const ProbabilisticForecast& forecast) {
    if (extremes.up.empty() || extremes.down.empty()) {
        throw std::invalid_argument("bounds method needs non-empty subsets");
    }
    if (set.horizon() != forecast.horizon()) {
        throw std::invalid_argument("scenario set and forecast horizons differ");
    }
    const auto s_up = expected_trajectory(set, extremes.up);
    const auto s_dn = expected_trajectory(set, extremes.down);
    const auto cf = forecast.central().values();
    MethodResult out{MethodId::bounds, zero_profile(forecast.grid(), "bounds"),
                     scenario_provenance(set) + " d=" + std::to_string(extremes.d)};
    const bool production = is_production(set.kind);
    for (std::size_t t = 0; t < cf.size(); ++t) {
        out.profile.up[t] = production ? cf[t] - s_up[t] : s_up[t] - cf[t];
        out.profile.down[t] = production ? s_dn[t] - cf[t] : cf[t] - s_dn[t];
    }
    warn_clamped("bounds", clamp_negatives(out.profile.up) + clamp_negatives(out.profile.down));
    out.profile.parameters["d"] = static_cast<double>(extremes.d);
    return out;
}

MethodResult method_prediction_interval(const ProbabilisticForecast& forecast, double pi, PiMode mode) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw std::invalid_argument("prediction interval must lie in (0,1)");
    }
    const double p_limit = (1.0 - pi) / 2.0;
    MethodResult out{MethodId::prediction_interval, zero_profile(forecast.grid(), "pi"),
                     mode == PiMode::relative ? "relative to central forecast" : "literal quantiles"};
    const bool production = is_production(forecast.kind());
    const auto cf = forecast.central().values();
    for (std::size_t t = 0; t < forecast.horizon(); ++t) {
        const auto& cdf = forecast.interval(t);
        const double low = cdf.inverse(p_limit);
        const double high = cdf.inverse(1.0 - p_limit);
        if (mode == PiMode::literal) {
            out.profile.up[t] = high;
            out.profile.down[t] = -low;
        } else if (production) {
            out.profile.up[t] = cf[t] - low;
            out.profile.down[t] = high - cf[t];
        } else {
            out.profile.up[t] = high - cf[t];
            out.profile.down[t] = cf[t] - low;
        }
    }
    warn_clamped("pi", clamp_negatives(out.profile.up) + clamp_negatives(out.profile.down));
    out.profile.parameters["pi"] = pi;
    out.profile.parameters["p_limit"] = p_limit;
    return out;
}

MethodResult method_hybrid(std::span<const MethodResult> results) {
    if (results.empty()) {
        throw std::invalid_argument("hybrid method needs at least one input");
    }
    MethodResult out{MethodId::hybrid, results.front().profile, ""};
    out.profile.method = "hybrid";
    out.profile.parameters.clear();
    for (std::size_t m = 0; m < results.size(); ++m) {
        const auto& p = results[m].profile;
        if (p.size() != out.profile.size()) {
            throw std::invalid_argument("hybrid inputs have different horizons");
        }
        for (std::size_t t = 0; t < p.size(); ++t) {
            out.profile.up[t] = std::max(out.profile.up[t], p.up[t]);
            out.profile.down[t] = std::max(out.profile.down[t], p.down[t]);
        }
        out.provenance += (m ? "+" : "") + std::string(to_string(results[m].id));
    }
    return out;
}

}  // namespace dynreserve
