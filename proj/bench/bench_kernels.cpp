// Serial reference vs OpenMP for the hot kernels.
#include <benchmark/benchmark.h>

#include "dynreserve/forecast_model.hpp"
#include "dynreserve/methods.hpp"
#include "dynreserve/scenario_engine.hpp"
#include "dynreserve/synthetic.hpp"

using namespace dynreserve;

namespace {

const Timestamp kDay = parse_timestamp("2020-07-01T00:00:00");

Execution mode(const benchmark::State& state) {
    return state.range(0) ? Execution::parallel : Execution::serial;
}

void BM_GenerateScenarios(benchmark::State& state) {
    const auto f = synthetic::solar_forecast(kDay);
    const CopulaParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_scenarios(f, static_cast<std::size_t>(state.range(1)), params, 1, mode(state)));
    }
}

void BM_AllScenarios(benchmark::State& state) {
    const auto f = synthetic::solar_forecast(kDay);
    const auto set = generate_scenarios(f, static_cast<std::size_t>(state.range(1)), CopulaParams{}, 1);
    const auto hist = synthetic::history(VariableKind::solar, parse_timestamp("2019-07-02T00:00:00"), 365, 1);
    const auto model = build_model(hist, ExplanatoryKind::rate_of_change, 20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(method_all_scenarios(set, model, 0.9, mode(state)));
    }
}

void BM_ForecastMoments(benchmark::State& state) {
    const auto f = synthetic::solar_forecast(kDay);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forecast_moments(f, static_cast<std::size_t>(state.range(1)), mode(state)));
    }
}

}  // namespace

BENCHMARK(BM_GenerateScenarios)->ArgsProduct({{0, 1}, {1000, 5000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AllScenarios)->ArgsProduct({{0, 1}, {1000, 5000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForecastMoments)->ArgsProduct({{0, 1}, {10000, 100000}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
