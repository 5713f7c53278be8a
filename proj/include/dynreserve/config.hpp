#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dynreserve/methods.hpp"
#include "dynreserve/reserve_engine.hpp"
#include "dynreserve/risk_engine.hpp"
#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

struct RunConfig {
    // Inputs. The solar forecast is probabilistic; load and wind forecasts may
    // carry only a central column. Empty paths are skipped.
    std::filesystem::path solar_forecast;
    std::filesystem::path load_forecast;
    std::filesystem::path wind_forecast;
    std::filesystem::path solar_history;
    std::filesystem::path load_history;
    std::filesystem::path wind_history;
    std::filesystem::path net_history;  // derived from the other three when empty

    std::vector<double> quantile_levels;  // empty: whatever the forecast file has
    CopulaParams copula;
    std::size_t scenarios = 1000;
    std::uint64_t seed = 20200701;
    std::size_t bins = 20;
    double ci = 0.9;
    double pi = 0.9;
    double extreme_fraction = 0.1;
    double risk_limit = 100.0;
    std::vector<MethodId> methods{MethodId::deterministic, MethodId::all_scenarios, MethodId::extreme_scenarios,
                                  MethodId::bounds,        MethodId::prediction_interval,
                                  MethodId::risk_based,    MethodId::hybrid};
    std::filesystem::path output_dir = "out";
    int threads = 0;  // 0: OpenMP default

    ExplanatoryKind load_explanatory = ExplanatoryKind::magnitude;
    ExplanatoryKind wind_explanatory = ExplanatoryKind::magnitude;
    ExplanatoryKind solar_explanatory = ExplanatoryKind::rate_of_change;
    ExplanatoryKind score_by = ExplanatoryKind::magnitude;
    PiMode pi_mode = PiMode::relative;
    GroupKey risk_grouping = GroupKey::hour_of_day;
    std::size_t moment_grid = 10000;
    std::vector<double> sensitivity_ci{0.8, 0.9, 0.95};
    std::vector<double> sensitivity_pi{0.8, 0.9, 0.95};

    // Throws std::invalid_argument naming the offending key.
    void validate() const;
    bool needs_scenarios() const;
};

// Flat JSON object whose keys mirror RunConfig fields (copula parameters as
// "theta", "omega", "jitter", "repair"). Unknown keys are rejected. Relative
// paths resolve against `base_dir`.
void apply_config_json(RunConfig& cfg, const std::string& text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Canonical JSON echo of every field, as written to the run manifest.
std::string config_to_json(const RunConfig& cfg);

}  // namespace dynreserve
