#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "dynreserve/history.hpp"
#include "dynreserve/reserve_engine.hpp"
#include "dynreserve/scenario_set.hpp"
#include "dynreserve/time_grid.hpp"

namespace fixture {

using namespace dynreserve;

inline const Timestamp kStart = parse_timestamp("2020-07-01T00:00");

inline HistoricalSeries make_history(VariableKind kind, const std::vector<double>& forecast,
                                     const std::vector<double>& actual, Timestamp start = kStart) {
    std::vector<HistoricalRecord> records;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        records.push_back({start + std::chrono::hours{static_cast<long>(i)}, forecast[i], actual[i]});
    }
    return HistoricalSeries(kind, std::move(records));
}

inline TimeGrid hourly(std::size_t n, Timestamp start = kStart) { return {start, std::chrono::minutes{60}, n}; }

inline ScenarioSet make_set(VariableKind kind, const std::vector<std::vector<double>>& values,
                            std::vector<double> probabilities = {}) {
    ScenarioSet set;
    set.kind = kind;
    set.grid = hourly(values.front().size());
    if (probabilities.empty()) probabilities.assign(values.size(), 1.0 / static_cast<double>(values.size()));
    for (std::size_t s = 0; s < values.size(); ++s) {
        set.scenarios.push_back({values[s], std::log(probabilities[s]), probabilities[s]});
    }
    return set;
}

// Small history with coarse values so ties, zero errors and edge hits occur.
struct SmallInstance {
    VariableKind kind = VariableKind::net_demand;
    std::vector<double> forecast;
    std::vector<double> actual;
    std::size_t bins = 1;
    double ci = 0.9;
    std::vector<double> query;
};

inline SmallInstance random_instance(std::mt19937_64& rng) {
    SmallInstance inst;
    const VariableKind kinds[] = {VariableKind::load, VariableKind::wind, VariableKind::solar,
                                  VariableKind::net_demand};
    inst.kind = kinds[std::uniform_int_distribution<int>(0, 3)(rng)];
    const auto n = std::uniform_int_distribution<std::size_t>(2, 50)(rng);
    inst.bins = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const bool coarse = std::bernoulli_distribution(0.5)(rng);
    std::uniform_real_distribution<double> level(0.0, 100.0);
    std::uniform_real_distribution<double> noise(-10.0, 10.0);
    for (std::size_t i = 0; i < n; ++i) {
        double f = level(rng);
        double e = noise(rng);
        if (coarse) {
            f = std::round(f / 10.0) * 10.0;
            e = std::round(e);
        }
        inst.forecast.push_back(f);
        inst.actual.push_back(f + e);
    }
    const double cis[] = {0.0, 0.5, 0.9, 0.95, 1.0};
    inst.ci = std::bernoulli_distribution(0.5)(rng) ? cis[std::uniform_int_distribution<int>(0, 4)(rng)]
                                                     : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (int q = 0; q < 12; ++q) {
        const double v = std::uniform_real_distribution<double>(-20.0, 120.0)(rng);
        inst.query.push_back(coarse ? std::round(v / 10.0) * 10.0 : v);
    }
    return inst;
}

}  // namespace fixture
