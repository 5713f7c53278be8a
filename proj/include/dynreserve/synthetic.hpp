#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "dynreserve/forecast_model.hpp"
#include "dynreserve/history.hpp"

namespace dynreserve::synthetic {

inline constexpr double kSolarCapacity = 10000.0;  // MW
inline constexpr double kWindCapacity = 6000.0;    // MW

// 24 hourly intervals from `day` 00:00, levels 0.05..0.95 in steps of 0.05.
// Day-time intervals follow a Kumaraswamy quantile function whose shape moves
// from right-skewed at dawn to left-skewed at dusk; night intervals are
// degenerate at 0. The central forecast is the median.
ProbabilisticForecast solar_forecast(Timestamp day);

// Central-only day-ahead forecasts.
ProbabilisticForecast load_forecast(Timestamp day);
ProbabilisticForecast wind_forecast(Timestamp day);

// Hourly forecast/actual pairs over `days` days starting at `start`.
HistoricalSeries history(VariableKind kind, Timestamp start, std::size_t days, std::uint64_t seed);

// Writes the bundled fixture: forecasts for 2020-07-01, one year of hourly
// histories ending the day before, and config.json.
void write_fixture(const std::filesystem::path& dir, std::uint64_t seed = 1);

}  // namespace dynreserve::synthetic
