#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "printing.hpp"
#include "oracles.hpp"

#include "dynreserve/risk_engine.hpp"

using namespace dynreserve;
using fixture::make_history;

namespace {

// One record per deviation, all at the same hour on consecutive days.
HistoricalSeries at_hour(int hour, const std::vector<double>& deviations, VariableKind kind = VariableKind::net_demand) {
    std::vector<HistoricalRecord> records;
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        const auto ts = fixture::kStart + std::chrono::hours{24 * static_cast<long>(i) + hour};
        records.push_back({ts, 100.0, 100.0 + deviations[i]});
    }
    return HistoricalSeries(kind, std::move(records));
}

const std::vector<double> kSix{-2, -1, 0, 1, 2, 3};

}  // namespace

TEST_CASE("tail risk examples") {
    const auto dist = build_deviation_distribution(at_hour(11, kSix), GroupKey::pooled);
    const auto& g = dist.group(0);
    CHECK(shortfall_risk(g, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(surplus_risk(g, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(shortfall_risk(g, 3.0) == 0.0);
    CHECK(shortfall_risk(g, 7.0) == 0.0);
    CHECK(surplus_risk(g, 2.0) == 0.0);
    CHECK(g.min == -2.0);
    CHECK(g.max == 3.0);

    ReserveProfile p = zero_profile(fixture::hourly(24), "x");
    std::fill(p.up.begin(), p.up.end(), 1.0);
    std::fill(p.down.begin(), p.down.end(), 1.0);
    const auto rp = risk(dist, p);
    for (std::size_t t = 0; t < 24; ++t) {
        CHECK(rp.short_risk[t] == shortfall_risk(g, 1.0));
        CHECK(rp.long_risk[t] == surplus_risk(g, 1.0));
    }
}

TEST_CASE("minimal reserve examples") {
    std::vector<double> s = kSix;
    CHECK(minimal_reserve(s, 1.0 / 3.0) == 2.0);
    CHECK(tail_risk(s, std::nextafter(2.0, 0.0)) > 1.0 / 3.0);
    CHECK(minimal_reserve(s, 0.0) == 3.0);
    CHECK(minimal_reserve(s, 1.5) == 0.0);
    CHECK(minimal_reserve(s, 100.0) == 0.0);
    const std::vector<double> neg{-5, -3};
    CHECK(minimal_reserve(neg, 0.0) == 0.0);

    const auto dist = build_deviation_distribution(at_hour(11, kSix), GroupKey::pooled);
    const auto sized = size_to_risk(dist, 1.0 / 3.0, fixture::hourly(24));
    CHECK(sized.up[5] == 2.0);
    // negated samples {-3..2}: smallest r with (#{x>r}/6)(2-r) <= 1/3 is 1
    CHECK(sized.down[5] == 1.0);
    CHECK(sized.method == "risk");
    CHECK(sized.parameters.at("risk_limit") == doctest::Approx(1.0 / 3.0));
    const auto zero = size_to_risk(dist, 0.0, fixture::hourly(2));
    CHECK(zero.up == std::vector<double>{3, 3});
    CHECK(zero.down == std::vector<double>{2, 2});
    CHECK_THROWS_AS(size_to_risk(dist, -1.0, fixture::hourly(2)), std::invalid_argument);
}

TEST_CASE("grouping by hour") {
    const auto only11 = build_deviation_distribution(at_hour(11, {1, 2}));
    CHECK(only11.group_count() == 24);
    CHECK_FALSE(only11.group(11).borrowed);
    CHECK(only11.group(12).borrowed);
    CHECK(only11.group(12).source == 11);
    CHECK(only11.group(12).samples == std::vector<double>{1, 2});
    CHECK(only11.group(0).source == 11);

    std::vector<HistoricalRecord> recs{{fixture::kStart + std::chrono::hours{10}, 0, 1},
                                       {fixture::kStart + std::chrono::hours{12}, 0, 2}};
    const auto tie = build_deviation_distribution(HistoricalSeries(VariableKind::load, recs));
    CHECK(tie.group(11).source == 10);
    CHECK(tie.group(23).source == 12);
    CHECK(tie.group(0).source == 10);

    std::vector<double> f(48, 50.0), a(48, 50.0);
    const auto flat = build_deviation_distribution(make_history(VariableKind::net_demand, f, a));
    for (std::size_t h = 0; h < 24; ++h) {
        CHECK(flat.group(h).samples == std::vector<double>{0, 0});
        CHECK(flat.group(h).min == 0.0);
        CHECK(flat.group(h).max == 0.0);
        CHECK_FALSE(flat.group(h).borrowed);
    }
    CHECK(flat.group_index(fixture::kStart + std::chrono::minutes{11 * 60 + 45}) == 11);

    // production deviations flip sign
    const auto solar = build_deviation_distribution(at_hour(3, {5}, VariableKind::solar));
    CHECK(solar.group(3).samples == std::vector<double>{-5});
    CHECK(solar.group(3).negated == std::vector<double>{5});

    CHECK_THROWS_AS(HistoricalSeries(VariableKind::net_demand, {}), std::invalid_argument);
}

TEST_CASE("risk matches the counting oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> x(std::uniform_int_distribution<int>(1, 40)(rng));
        const bool coarse = trial % 2 == 0;
        for (auto& v : x) {
            v = std::normal_distribution<double>(0, 50)(rng);
            if (coarse) v = std::round(v / 10) * 10;
        }
        auto sorted = x;
        std::sort(sorted.begin(), sorted.end());
        const double range = sorted.back() - sorted.front();
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 40; ++k) {
            const double r = k * 5.0;
            const double got = tail_risk(sorted, r);
            CHECK(got == doctest::Approx(oracle::tail_risk(x, r)).epsilon(1e-14));
            CHECK(got <= prev);
            CHECK(got >= 0.0);
            prev = got;
        }
        const double limit = std::uniform_real_distribution<double>(0, 30)(rng);
        const double r = minimal_reserve(sorted, limit);
        CHECK(tail_risk(sorted, r) <= limit);
        CHECK(std::abs(r - oracle::minimal_reserve(x, limit)) <= 1e-9 * std::max(range, 1.0));
        if (r > 0.0) CHECK(tail_risk(sorted, r - 1e-6 * std::max(range, 1.0)) > limit);
    }
}
