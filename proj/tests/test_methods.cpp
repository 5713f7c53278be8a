#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "printing.hpp"

#include "dynreserve/methods.hpp"
#include "dynreserve/scenario_engine.hpp"
#include "dynreserve/synthetic.hpp"

using namespace dynreserve;
using fixture::make_history;
using fixture::make_set;

namespace {

ProbabilisticForecast band_forecast(VariableKind kind, const std::vector<double>& cf, const std::vector<double>& lo,
                                    const std::vector<double>& hi) {
    std::vector<IntervalCdf> cdfs;
    for (std::size_t t = 0; t < cf.size(); ++t) {
        cdfs.emplace_back(std::vector<Threshold>{{0.05, lo[t]}, {0.5, cf[t]}, {0.95, hi[t]}});
    }
    return ProbabilisticForecast(TimeSeries(kind, fixture::kStart, std::chrono::minutes{60}, cf), std::move(cdfs));
}

// Up needs grow with the explanatory variable: 1 up to 50, 3 above.
ReserveModel step_model(VariableKind kind) {
    std::vector<double> f, a;
    for (int i = 0; i <= 100; i += 10) {
        f.push_back(i);
        const double need = i <= 50 ? 1.0 : 3.0;
        a.push_back(is_production(kind) ? i - need : i + need);
    }
    return build_model(make_history(kind, f, a), ExplanatoryKind::magnitude, 2);
}

MethodResult result_of(MethodId id, std::vector<double> up, std::vector<double> dn) {
    MethodResult r{id, zero_profile(fixture::hourly(up.size()), "x"), ""};
    r.profile.up = std::move(up);
    r.profile.down = std::move(dn);
    return r;
}

}  // namespace

TEST_CASE("method names") {
    for (auto id : {MethodId::deterministic, MethodId::all_scenarios, MethodId::extreme_scenarios, MethodId::bounds,
                    MethodId::prediction_interval, MethodId::hybrid, MethodId::risk_based}) {
        CHECK(parse_method(to_string(id)) == id);
    }
    CHECK(family(MethodId::deterministic) == MethodFamily::recursive);
    CHECK(family(MethodId::bounds) == MethodFamily::anticipative);
    CHECK(family(MethodId::hybrid) == MethodFamily::hybrid);
    CHECK_THROWS_AS(parse_method("median"), std::invalid_argument);
}

TEST_CASE("all scenarios") {
    const auto model = step_model(VariableKind::solar);
    const auto single = make_set(VariableKind::solar, {{10, 80}}, {1.0});
    const auto r1 = method_all_scenarios(single, model, 0.9);
    CHECK(r1.profile.up == std::vector<double>{1, 3});

    // scenario profiles [1] and [3] -> expectation 2
    const auto pair = make_set(VariableKind::solar, {{10}, {80}});
    CHECK(method_all_scenarios(pair, model, 0.9).profile.up == std::vector<double>{2});
    const auto skew = make_set(VariableKind::solar, {{10}, {80}}, {0.75, 0.25});
    CHECK(method_all_scenarios(skew, model, 0.9).profile.up == std::vector<double>{1.5});

    const auto serial = method_all_scenarios(pair, model, 0.9, Execution::serial);
    CHECK(serial.profile.up == method_all_scenarios(pair, model, 0.9, Execution::parallel).profile.up);
}

TEST_CASE("central-only set reproduces the deterministic baseline") {
    const std::vector<double> cf{5, 40, 60, 95};
    const auto fc = band_forecast(VariableKind::solar, cf, {0, 30, 50, 90}, {10, 50, 70, 100});
    const auto model = step_model(VariableKind::solar);
    const auto det = method_deterministic(fc, model, 0.9);
    const auto set = make_set(VariableKind::solar, {cf, cf, cf}, {0.2, 0.3, 0.5});
    const auto all = method_all_scenarios(set, model, 0.9);
    CHECK(all.profile.up == det.profile.up);
    CHECK(all.profile.down == det.profile.down);
}

TEST_CASE("extreme selection") {
    // magnitude scores 10, 5, 8
    const auto solar = make_set(VariableKind::solar, {{4, 6}, {2, 3}, {8, 0}});
    const auto ex = select_extremes(solar, 1);
    CHECK(ex.scores == std::vector<double>{10, 5, 8});
    CHECK(ex.up == std::vector<std::size_t>{1});
    CHECK(ex.down == std::vector<std::size_t>{0});

    const auto load = make_set(VariableKind::load, {{4, 6}, {2, 3}, {8, 0}});
    const auto exl = select_extremes(load, 1);
    CHECK(exl.up == std::vector<std::size_t>{0});
    CHECK(exl.down == std::vector<std::size_t>{1});

    const auto all = select_extremes(solar, 3);
    CHECK(all.up == std::vector<std::size_t>{0, 1, 2});
    CHECK(all.down == std::vector<std::size_t>{0, 1, 2});

    const auto tied = make_set(VariableKind::solar, {{5}, {7}, {5}, {7}});
    const auto ext = select_extremes(tied, 1);
    CHECK(ext.up == std::vector<std::size_t>{0});
    CHECK(ext.down == std::vector<std::size_t>{1});

    const auto rate = select_extremes(solar, 1, ExplanatoryKind::rate_of_change);
    CHECK(rate.scores == std::vector<double>{4, 2, -16});

    CHECK_THROWS_AS(select_extremes(solar, 4), std::invalid_argument);
    CHECK_THROWS_AS(select_extremes(solar, 0), std::invalid_argument);

    CHECK(extreme_count(1000, 0.1) == 100);
    CHECK(extreme_count(15, 0.1) == 2);
    CHECK(extreme_count(5, 0.01) == 1);
    CHECK(extreme_count(7, 1.0) == 7);
    CHECK_THROWS_AS(extreme_count(7, 0.0), std::invalid_argument);
}

TEST_CASE("extreme scenarios") {
    const auto model = step_model(VariableKind::solar);
    const auto set = make_set(VariableKind::solar, {{10, 20}, {80, 90}, {30, 70}}, {0.5, 0.2, 0.3});
    const auto full = select_extremes(set, 3);
    const auto a = method_all_scenarios(set, model, 0.9);
    const auto e = method_extreme_scenarios(set, full, model, 0.9);
    CHECK(e.profile.up == a.profile.up);
    CHECK(e.profile.down == a.profile.down);

    ExtremeSubsets single;
    single.d = 1;
    single.up = {0};
    single.down = {1};
    const auto s = method_extreme_scenarios(set, single, model, 0.9);
    CHECK(s.profile.up == std::vector<double>{1, 1});

    ExtremeSubsets two;
    two.d = 2;
    two.up = {0, 1};
    two.down = {0, 1};
    const auto eq = make_set(VariableKind::solar, {{10, 20}, {80, 90}, {30, 70}});
    CHECK(method_extreme_scenarios(eq, two, model, 0.9).profile.up == std::vector<double>{2, 2});

    ExtremeSubsets empty;
    CHECK_THROWS_AS(method_extreme_scenarios(set, empty, model, 0.9), std::invalid_argument);
}

TEST_CASE("bounds") {
    const auto fc = band_forecast(VariableKind::solar, {4, 5}, {0, 0}, {10, 10});
    const auto set = make_set(VariableKind::solar, {{1, 2}, {4, 5}, {3, 4}}, {0.5, 0.25, 0.25});
    ExtremeSubsets ex;
    ex.d = 1;
    ex.up = {0};
    ex.down = {1};
    const auto r = method_bounds(set, ex, fc);
    CHECK(r.profile.up == std::vector<double>{3, 3});
    CHECK(r.profile.down == std::vector<double>{0, 0});

    // equiprobable up members [1,2] and [3,4] give s_up = [2,3]
    ExtremeSubsets two;
    two.d = 2;
    two.up = {0, 2};
    two.down = {1, 2};
    const auto eq = make_set(VariableKind::solar, {{1, 2}, {6, 9}, {3, 4}});
    const auto b = method_bounds(eq, two, fc);
    CHECK(b.profile.up == std::vector<double>{2, 2});
    CHECK(b.profile.down == std::vector<double>{0.5, 1.5});

    // load flips the direction; negatives clamp
    const auto lfc = band_forecast(VariableKind::load, {4, 5}, {0, 0}, {10, 10});
    const auto lset = make_set(VariableKind::load, {{6, 4}, {3, 3}});
    ExtremeSubsets lex;
    lex.d = 1;
    lex.up = {0};
    lex.down = {1};
    const auto l = method_bounds(lset, lex, lfc);
    CHECK(l.profile.up == std::vector<double>{2, 0});
    CHECK(l.profile.down == std::vector<double>{1, 2});
}

TEST_CASE("prediction interval") {
    const auto fc = band_forecast(VariableKind::solar, {50, 0}, {40, 0}, {60, 0});
    const auto r = method_prediction_interval(fc, 0.9);
    CHECK(r.profile.parameters.at("p_limit") == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(r.profile.up[0] == 10.0);
    CHECK(r.profile.down[0] == 10.0);
    CHECK(r.profile.up[1] == 0.0);
    CHECK(r.profile.down[1] == 0.0);

    const auto asym = band_forecast(VariableKind::solar, {50}, {30}, {55});
    const auto s = method_prediction_interval(asym, 0.9);
    CHECK(s.profile.up[0] == 20.0);
    CHECK(s.profile.down[0] == 5.0);
    const auto ld = band_forecast(VariableKind::load, {50}, {30}, {55});
    const auto l = method_prediction_interval(ld, 0.9);
    CHECK(l.profile.up[0] == 5.0);
    CHECK(l.profile.down[0] == 20.0);
    const auto lit = method_prediction_interval(ld, 0.9, PiMode::literal);
    CHECK(lit.profile.up[0] == 55.0);
    CHECK(lit.profile.down[0] == 0.0);

    CHECK_THROWS_AS(method_prediction_interval(fc, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(method_prediction_interval(fc, 1.0), std::invalid_argument);

    const auto solar = synthetic::solar_forecast(fixture::kStart);
    std::vector<double> prev_up(solar.horizon(), 0.0), prev_dn(solar.horizon(), 0.0);
    for (double pi : {0.1, 0.5, 0.8, 0.9, 0.95, 0.99}) {
        const auto p = method_prediction_interval(solar, pi);
        for (std::size_t t = 0; t < solar.horizon(); ++t) {
            CHECK(p.profile.up[t] >= prev_up[t]);
            CHECK(p.profile.down[t] >= prev_dn[t]);
            CHECK(p.profile.up[t] >= 0.0);
        }
        prev_up = p.profile.up;
        prev_dn = p.profile.down;
    }
}

TEST_CASE("hybrid") {
    const auto a = result_of(MethodId::all_scenarios, {1, 5}, {0, 2});
    const auto b = result_of(MethodId::bounds, {3, 2}, {1, 1});
    const auto c = result_of(MethodId::prediction_interval, {2, 6}, {4, 0});
    const std::vector<MethodResult> ab{a, b};
    const auto h = method_hybrid(ab);
    CHECK(h.profile.up == std::vector<double>{3, 5});
    CHECK(h.profile.down == std::vector<double>{1, 2});
    CHECK(h.provenance == "all+bounds");

    const std::vector<MethodResult> one{a};
    CHECK(method_hybrid(one).profile.up == a.profile.up);

    const std::vector<MethodResult> nested{h, c};
    const std::vector<MethodResult> flat{a, b, c};
    CHECK(method_hybrid(nested).profile.up == method_hybrid(flat).profile.up);
    CHECK(method_hybrid(nested).profile.down == method_hybrid(flat).profile.down);

    CHECK_THROWS_AS(method_hybrid(std::span<const MethodResult>{}), std::invalid_argument);
    const std::vector<MethodResult> bad{a, result_of(MethodId::bounds, {1}, {1})};
    CHECK_THROWS_AS(method_hybrid(bad), std::invalid_argument);
}

TEST_CASE("methods on generated scenarios") {
    const auto solar = synthetic::solar_forecast(fixture::kStart);
    const auto set = generate_scenarios(solar, 200, CopulaParams{}, 99);
    const auto hist = synthetic::history(VariableKind::solar, parse_timestamp("2019-07-02T00:00"), 60, 3);
    const auto model = build_model(hist, ExplanatoryKind::rate_of_change, 20);
    const auto ex = select_extremes(set, extreme_count(set.size(), 0.1));
    CHECK(ex.up.size() == 20);
    std::vector<MethodResult> all{
        method_deterministic(solar, model, 0.9),
        method_all_scenarios(set, model, 0.9),
        method_extreme_scenarios(set, ex, model, 0.9),
        method_bounds(set, ex, solar),
        method_prediction_interval(solar, 0.9),
    };
    const auto serial = method_all_scenarios(set, model, 0.9, Execution::serial);
    CHECK(serial.profile.up == all[1].profile.up);
    CHECK(serial.profile.down == all[1].profile.down);
    const auto h = method_hybrid(all);
    for (const auto& r : all) {
        for (std::size_t t = 0; t < solar.horizon(); ++t) {
            CHECK(r.profile.up[t] >= 0.0);
            CHECK(r.profile.down[t] >= 0.0);
            CHECK(h.profile.up[t] >= r.profile.up[t]);
            CHECK(h.profile.down[t] >= r.profile.down[t]);
        }
    }
}
