#include "dynreserve/risk_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dynreserve/log.hpp"

namespace dynreserve {

namespace {

constexpr std::size_t kHours = 24;

DeviationGroup make_group(std::vector<double> samples, std::size_t source) {
    DeviationGroup g;
    std::sort(samples.begin(), samples.end());
    g.negated.resize(samples.size());
    std::transform(samples.rbegin(), samples.rend(), g.negated.begin(), [](double x) { return -x; });
    g.min = samples.front();
    g.max = samples.back();
    g.samples = std::move(samples);
    g.source = source;
    return g;
}

}  // namespace

DeviationDistribution::DeviationDistribution(GroupKey key, std::vector<DeviationGroup> groups)
    : key_(key), groups_(std::move(groups)) {
    const std::size_t expected = key_ == GroupKey::hour_of_day ? kHours : 1;
    if (groups_.size() != expected) {
        throw std::invalid_argument("deviation distribution expects " + std::to_string(expected) + " groups, got " +
                                    std::to_string(groups_.size()));
    }
    for (const auto& g : groups_) {
        if (g.samples.empty()) throw std::invalid_argument("deviation group without samples");
    }
}

std::size_t DeviationDistribution::group_index(Timestamp ts) const {
    if (key_ == GroupKey::pooled) return 0;
    const auto h = static_cast<std::size_t>(std::floor(hour_of_day(ts)));
    return std::min(h, kHours - 1);
}

DeviationDistribution build_deviation_distribution(const HistoricalSeries& history, GroupKey key) {
    if (history.size() == 0) {
        throw std::invalid_argument("deviation distribution needs a non-empty history");
    }
    const double sign = is_production(history.kind()) ? -1.0 : 1.0;
    const std::size_t n_groups = key == GroupKey::hour_of_day ? kHours : 1;
    std::vector<std::vector<double>> buckets(n_groups);
    for (const auto& rec : history.records()) {
        const std::size_t g =
            key == GroupKey::pooled ? 0 : std::min(static_cast<std::size_t>(hour_of_day(rec.timestamp)), kHours - 1);
        buckets[g].push_back(sign * (rec.actual - rec.forecast));
    }

    std::vector<DeviationGroup> groups(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (buckets[g].empty()) continue;
        groups[g] = make_group(buckets[g], g);
    }
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (!buckets[g].empty()) continue;
        std::size_t src = g;
        for (std::size_t d = 1; d <= n_groups / 2 && src == g; ++d) {
            const std::size_t earlier = (g + n_groups - d) % n_groups;
            const std::size_t later = (g + d) % n_groups;
            if (!buckets[earlier].empty()) {
                src = earlier;
            } else if (!buckets[later].empty()) {
                src = later;
            }
        }
        groups[g] = groups[src];
        groups[g].borrowed = true;
        groups[g].source = src;
        log::warn("no deviations for hour " + std::to_string(g) + "; borrowing hour " + std::to_string(src));
    }
    return DeviationDistribution(key, std::move(groups));
}

double tail_risk(std::span<const double> sorted, double reserve) {
    const double top = sorted.back();
    if (!(reserve < top)) return 0.0;
    const auto first_above = std::upper_bound(sorted.begin(), sorted.end(), reserve);
    const auto count = static_cast<double>(sorted.end() - first_above);
    return count / static_cast<double>(sorted.size()) * (top - reserve);
}

double shortfall_risk(const DeviationGroup& group, double reserve_up) { return tail_risk(group.samples, reserve_up); }

double surplus_risk(const DeviationGroup& group, double reserve_down) { return tail_risk(group.negated, reserve_down); }

RiskProfile risk(const DeviationDistribution& dist, const ReserveProfile& profile) {
    RiskProfile out{profile.grid, std::vector<double>(profile.size()), std::vector<double>(profile.size())};
    for (std::size_t t = 0; t < profile.size(); ++t) {
        const auto& g = dist.group_for(profile.grid.at(t));
        out.short_risk[t] = shortfall_risk(g, profile.up[t]);
        out.long_risk[t] = surplus_risk(g, profile.down[t]);
    }
    return out;
}

double minimal_reserve(std::span<const double> sorted, double limit) {
    if (limit < 0.0) throw std::invalid_argument("risk limit must be >= 0");
    if (tail_risk(sorted, 0.0) <= limit) return 0.0;

    const double top = sorted.back();
    const double n = static_cast<double>(sorted.size());
    // Risk is linear on each piece [a, b) between consecutive distinct samples.
    double a = 0.0;
    auto it = std::upper_bound(sorted.begin(), sorted.end(), a);
    while (it != sorted.end()) {
        const double b = *it;
        const double count = static_cast<double>(sorted.end() - it);
        double r = std::max(a, top - limit * n / count);
        if (r < b) {
            while (tail_risk(sorted, r) > limit) r = std::nextafter(r, std::numeric_limits<double>::infinity());
            return r;
        }
        a = b;
        it = std::upper_bound(it, sorted.end(), a);
    }
    return top;
}

ReserveProfile size_to_risk(const DeviationDistribution& dist, double limit, const TimeGrid& grid) {
    if (limit < 0.0) throw std::invalid_argument("risk limit must be >= 0");
    ReserveProfile out = zero_profile(grid, "risk");
    for (std::size_t t = 0; t < grid.size; ++t) {
        const auto& g = dist.group_for(grid.at(t));
        out.up[t] = minimal_reserve(g.samples, limit);
        out.down[t] = minimal_reserve(g.negated, limit);
    }
    out.parameters["risk_limit"] = limit;
    return out;
}

}  // namespace dynreserve
