#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dynreserve/history.hpp"
#include "dynreserve/reserve_engine.hpp"

namespace dynreserve {

enum class GroupKey { hour_of_day, pooled };

struct DeviationGroup {
    std::vector<double> samples;  // net-demand sign convention, ascending
    std::vector<double> negated;  // -samples, ascending
    double min = 0.0;
    double max = 0.0;
    bool borrowed = false;        // copied from the nearest populated group
    std::size_t source = 0;       // group the samples came from
};

/// Empirical deviation distribution per group (hour of day by default).
class DeviationDistribution {
public:
    DeviationDistribution(GroupKey key, std::vector<DeviationGroup> groups);

    GroupKey key() const { return key_; }
    std::size_t group_count() const { return groups_.size(); }
    const DeviationGroup& group(std::size_t g) const { return groups_[g]; }
    std::size_t group_index(Timestamp ts) const;
    const DeviationGroup& group_for(Timestamp ts) const { return groups_[group_index(ts)]; }

private:
    GroupKey key_;
    std::vector<DeviationGroup> groups_;
};

// Groups actual - forecast by hour of day (or pools everything). Production
// variables are negated so a positive deviation always calls for UP reserve.
// Empty hours borrow the nearest populated hour (circular distance, earlier
// hour on ties). Throws std::invalid_argument on an empty history.
DeviationDistribution build_deviation_distribution(const HistoricalSeries& history,
                                                   GroupKey key = GroupKey::hour_of_day);

// Exceedance risk of one tail: (#{x > r} / n) * (max(x) - r) when r < max(x),
// else 0. `sorted` ascending, non-empty.
double tail_risk(std::span<const double> sorted, double reserve);

double shortfall_risk(const DeviationGroup& group, double reserve_up);
double surplus_risk(const DeviationGroup& group, double reserve_down);

struct RiskProfile {
    TimeGrid grid;
    std::vector<double> short_risk;
    std::vector<double> long_risk;
};

RiskProfile risk(const DeviationDistribution& dist, const ReserveProfile& profile);

// Smallest r >= 0 with tail_risk(sorted, r) <= limit.
double minimal_reserve(std::span<const double> sorted, double limit);

// Per interval, the smallest up and down reserves that keep both risks at or
// below `limit`. Throws std::invalid_argument when limit < 0.
ReserveProfile size_to_risk(const DeviationDistribution& dist, double limit, const TimeGrid& grid);

}  // namespace dynreserve
