#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynreserve/history.hpp"
#include "dynreserve/time_grid.hpp"
#include "dynreserve/variable_kind.hpp"

namespace dynreserve {

enum class Direction { up, down };

enum class ExplanatoryKind { magnitude, rate_of_change, hour_of_day };

std::string_view to_string(ExplanatoryKind kind);
ExplanatoryKind parse_explanatory_kind(std::string_view text);  // magnitude|rate|hour

// Explanatory variable per record: the forecast itself, its first difference
// (forward difference at the first record, backward elsewhere) or the hour of day.
std::vector<double> explanatory_series(std::span<const double> forecast,
                                       std::span<const Timestamp> timestamps, ExplanatoryKind kind);
std::vector<double> explanatory_series(std::span<const double> forecast, const TimeGrid& grid,
                                       ExplanatoryKind kind);

// actual - forecast per record.
std::vector<double> compute_errors(const HistoricalSeries& history);

struct DirectionalNeeds {
    std::vector<double> up;    // MW > 0
    std::vector<double> down;  // MW > 0
};

// Splits errors by the reserve direction they call for; zeros are dropped.
DirectionalNeeds itemize(std::span<const double> errors, VariableKind kind);

// Empirical quantile, linear between order statistics at 1-based rank
// h = (n-1)*ci + 1. `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double ci);
// Sorts a copy. Throws std::invalid_argument on an empty population.
double quantile(std::span<const double> population, double ci);

/// Historical reserve needs binned by an explanatory variable into B
/// equal-width bins. Immutable after construction.
class ReserveModel {
public:
    std::size_t bin_count() const { return edges_.size() - 1; }
    ExplanatoryKind explanatory() const { return explanatory_; }
    VariableKind kind() const { return kind_; }
    std::span<const double> edges() const { return edges_; }
    // True when the explanatory variable had zero range and one bin was used.
    bool collapsed() const { return collapsed_; }

    // Bin (0-based) a value falls in, clamped to the first/last bin outside
    // [l_0, l_B].
    std::size_t bin_index(double nu) const;

    // Sorted population stored in bin b (possibly empty).
    std::span<const double> population(Direction dir, std::size_t b) const;

    // Population actually used for bin b: itself, or the nearest non-empty bin
    // (ties go to the lower index). Empty when every bin is empty.
    std::span<const double> effective_population(Direction dir, std::size_t b) const;

    // Quantile of the bin selected by nu; 0 when no bin holds data.
    double requirement(Direction dir, double nu, double ci) const;

private:
    friend ReserveModel build_model(const HistoricalSeries&, ExplanatoryKind, std::size_t);

    VariableKind kind_ = VariableKind::net_demand;
    ExplanatoryKind explanatory_ = ExplanatoryKind::magnitude;
    bool collapsed_ = false;
    std::vector<double> edges_;
    std::vector<std::vector<double>> up_;
    std::vector<std::vector<double>> down_;
    std::vector<std::size_t> up_source_;
    std::vector<std::size_t> down_source_;
};

// Throws std::invalid_argument when bins == 0 or the history has < 2 records.
ReserveModel build_model(const HistoricalSeries& history, ExplanatoryKind explanatory,
                         std::size_t bins);

struct ReserveProfile {
    TimeGrid grid;
    std::vector<double> up;    // MW >= 0
    std::vector<double> down;  // MW >= 0
    std::string method;
    std::map<std::string, double> parameters;

    std::size_t size() const { return up.size(); }
};

ReserveProfile zero_profile(const TimeGrid& grid, std::string method);

// Per interval, the CI-quantile of the bin selected by nu[t].
ReserveProfile requirements(const ReserveModel& model, std::span<const double> nu, double ci,
                            const TimeGrid& grid);

// Root-sum-square per interval and direction; throws std::invalid_argument on
// horizon mismatch.
ReserveProfile rss_combine(const ReserveProfile& load, const ReserveProfile& wind,
                           const ReserveProfile& solar);

}  // namespace dynreserve
