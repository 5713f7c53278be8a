#include "dynreserve/history.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace dynreserve {

HistoricalSeries::HistoricalSeries(VariableKind kind, std::vector<HistoricalRecord> records,
                                   std::chrono::minutes resolution)
    : kind_(kind), resolution_(resolution), records_(std::move(records)) {
    if (records_.empty()) {
        throw std::invalid_argument("historical series needs at least one record");
    }
    if (resolution_.count() <= 0) {
        throw std::invalid_argument("historical series resolution must be positive");
    }
    std::sort(records_.begin(), records_.end(),
              [](const HistoricalRecord& a, const HistoricalRecord& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < records_.size(); ++i) {
        if (records_[i].timestamp == records_[i - 1].timestamp) {
            throw std::invalid_argument("duplicate timestamp " + format_timestamp(records_[i].timestamp));
        }
    }
}

std::vector<double> HistoricalSeries::forecasts() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.forecast);
    return out;
}

std::vector<double> HistoricalSeries::actuals() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.actual);
    return out;
}

std::vector<Timestamp> HistoricalSeries::timestamps() const {
    std::vector<Timestamp> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.timestamp);
    return out;
}

HistoricalSeries combine_net_demand_history(const HistoricalSeries& load, const HistoricalSeries& wind,
                                            const HistoricalSeries& solar) {
    auto index = [](const HistoricalSeries& h) {
        std::unordered_map<long long, const HistoricalRecord*> m;
        for (const auto& r : h.records()) m.emplace(r.timestamp.time_since_epoch().count(), &r);
        return m;
    };
    const auto wind_at = index(wind);
    const auto solar_at = index(solar);
    std::vector<HistoricalRecord> out;
    for (const auto& l : load.records()) {
        const auto key = l.timestamp.time_since_epoch().count();
        const auto w = wind_at.find(key);
        const auto s = solar_at.find(key);
        if (w == wind_at.end() || s == solar_at.end()) continue;
        out.push_back({l.timestamp, l.forecast - w->second->forecast - s->second->forecast,
                       l.actual - w->second->actual - s->second->actual});
    }
    if (out.empty()) {
        throw std::invalid_argument("load, wind and solar histories share no timestamp");
    }
    const auto res = std::max({load.resolution(), wind.resolution(), solar.resolution()});
    return HistoricalSeries(VariableKind::net_demand, std::move(out), res);
}

}  // namespace dynreserve
