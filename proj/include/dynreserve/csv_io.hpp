#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynreserve/forecast_model.hpp"
#include "dynreserve/history.hpp"
#include "dynreserve/reserve_engine.hpp"
#include "dynreserve/risk_engine.hpp"
#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

// Shortest representation that parses back to the same double.
std::string format_number(double v);
double parse_number(std::string_view text);

// CSV `timestamp,forecast_mw,actual_mw`. Errors carry the file and line number:
// malformed rows, missing columns, non-increasing or duplicate timestamps.
HistoricalSeries load_history(const std::filesystem::path& path, VariableKind kind);
void write_history(const std::filesystem::path& path, const HistoricalSeries& history);

// CSV `timestamp,central,pNN,...` where NN is the level in percent (p2.5 is
// allowed). When `levels` is given the quantile columns must match it. A file
// with only `central` yields degenerate intervals at the central value.
ProbabilisticForecast load_forecast(const std::filesystem::path& path, VariableKind kind,
                                    const std::optional<std::vector<double>>& levels = std::nullopt);
void write_forecast(const std::filesystem::path& path, const ProbabilisticForecast& forecast);

// "p5", "p2.5", "p97.5".
std::string level_column(double p);

// scenarios.csv (`scenario_id,probability,t0,...`) plus a JSON sidecar
// `<stem>.meta.json` carrying kind, grid, seed and copula parameters.
void write_scenarios(const std::filesystem::path& path, const ScenarioSet& set);
ScenarioSet load_scenarios(const std::filesystem::path& path);

// `timestamp,r_up_mw,r_dn_mw,method`.
void write_reserves(const std::filesystem::path& path, const ReserveProfile& profile);
ReserveProfile load_reserves(const std::filesystem::path& path);

// `timestamp,rho_short,rho_long`.
void write_risk(const std::filesystem::path& path, const RiskProfile& profile);
RiskProfile load_risk(const std::filesystem::path& path);

// Interval mean onto a coarser grid; `target` must be a multiple of the
// current resolution and the horizon must divide evenly.
ProbabilisticForecast resample_forecast(const ProbabilisticForecast& forecast, std::chrono::minutes target);
HistoricalSeries resample_history(const HistoricalSeries& history, std::chrono::minutes target);

}  // namespace dynreserve
