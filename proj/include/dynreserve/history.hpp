#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "dynreserve/time_grid.hpp"
#include "dynreserve/variable_kind.hpp"

namespace dynreserve {

struct HistoricalRecord {
    Timestamp timestamp;
    double forecast = 0.0;  // MW
    double actual = 0.0;    // MW
};

/// Aligned forecast/actual records of one variable. Records are kept sorted by
/// timestamp, so everything derived from a series is independent of the order
/// the records were supplied in.
class HistoricalSeries {
public:
    // Throws std::invalid_argument on an empty record set or duplicate timestamps.
    HistoricalSeries(VariableKind kind, std::vector<HistoricalRecord> records,
                     std::chrono::minutes resolution = std::chrono::minutes{60});

    VariableKind kind() const { return kind_; }
    std::chrono::minutes resolution() const { return resolution_; }
    std::span<const HistoricalRecord> records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::vector<double> forecasts() const;
    std::vector<double> actuals() const;
    std::vector<Timestamp> timestamps() const;

private:
    VariableKind kind_;
    std::chrono::minutes resolution_;
    std::vector<HistoricalRecord> records_;
};

// Net demand history n = load - wind - solar on the timestamps common to all
// three series. Throws std::invalid_argument when no timestamp is shared.
HistoricalSeries combine_net_demand_history(const HistoricalSeries& load, const HistoricalSeries& wind,
                                            const HistoricalSeries& solar);

}  // namespace dynreserve
