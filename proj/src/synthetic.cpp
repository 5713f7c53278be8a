#include "dynreserve/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dynreserve/csv_io.hpp"
#include "dynreserve/scenario_engine.hpp"

namespace dynreserve::synthetic {

namespace fs = std::filesystem;
using std::chrono::hours;
using std::chrono::minutes;

namespace {

double kumaraswamy_quantile(double p, double a, double b) {
    return std::pow(1.0 - std::pow(1.0 - p, 1.0 / b), 1.0 / a);
}

// Clear-sky shape, positive from 06:00 to 19:00.
double daylight(double hour) {
    if (hour < 5.5 || hour > 19.5) return 0.0;
    return std::max(std::sin(std::numbers::pi * (hour - 5.5) / 14.0), 0.0);
}

double load_shape(double hour, double day_of_year) {
    const double daily = std::sin(std::numbers::pi * (hour - 5.0) / 12.0);
    const double seasonal = std::cos(2.0 * std::numbers::pi * (day_of_year - 200.0) / 365.0);
    return 26000.0 + 5000.0 * daily + 3000.0 * seasonal;
}

double wind_shape(double hour) { return 2600.0 + 900.0 * std::cos(2.0 * std::numbers::pi * (hour - 3.0) / 24.0); }

ProbabilisticForecast central_only(VariableKind kind, Timestamp day, auto&& value) {
    std::vector<double> central(24);
    std::vector<IntervalCdf> intervals;
    for (int h = 0; h < 24; ++h) {
        central[h] = value(static_cast<double>(h));
        intervals.push_back(IntervalCdf::atom(central[h]));
    }
    return ProbabilisticForecast(TimeSeries(kind, day, minutes{60}, std::move(central)), std::move(intervals));
}

}  // namespace

ProbabilisticForecast solar_forecast(Timestamp day) {
    std::vector<double> central(24);
    std::vector<IntervalCdf> intervals;
    for (int h = 0; h < 24; ++h) {
        const double scale = kSolarCapacity * daylight(h);
        if (scale <= 0.0) {
            intervals.push_back(IntervalCdf::atom(0.0));
            continue;
        }
        const double x = (h - 6) / 13.0;
        const double a = 0.4 * std::exp(2.6 * x);
        const double b = 5.0 * std::exp(-2.6 * x) + 0.3;
        auto value = [&](double p) { return scale * (0.35 + 0.3 * kumaraswamy_quantile(p, a, b)); };
        std::vector<Threshold> th;
        for (int k = 1; k <= 19; ++k) th.push_back({k / 20.0, value(k / 20.0)});
        central[h] = value(0.5);
        intervals.emplace_back(std::move(th));
    }
    return ProbabilisticForecast(TimeSeries(VariableKind::solar, day, minutes{60}, std::move(central)),
                                 std::move(intervals));
}

ProbabilisticForecast load_forecast(Timestamp day) {
    const auto days = std::chrono::floor<std::chrono::days>(day);
    const auto ymd = std::chrono::year_month_day{days};
    const double doy = (days - std::chrono::sys_days{ymd.year() / 1 / 1}).count();
    return central_only(VariableKind::load, day, [&](double h) { return load_shape(h, doy); });
}

ProbabilisticForecast wind_forecast(Timestamp day) {
    return central_only(VariableKind::wind, day, [](double h) { return wind_shape(h); });
}

HistoricalSeries history(VariableKind kind, Timestamp start, std::size_t days, std::uint64_t seed) {
    ScenarioStream rng(seed, static_cast<std::uint64_t>(kind) + 1);
    std::vector<HistoricalRecord> records;
    records.reserve(days * 24);
    double ar = 0.0;       // autocorrelated error state
    double level = 0.0;    // wind regime
    double cloud = 1.0;
    for (std::size_t d = 0; d < days; ++d) {
        const auto day = start + hours{24 * static_cast<long>(d)};
        const auto ymd = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(day)};
        const double doy =
            (std::chrono::floor<std::chrono::days>(day) - std::chrono::sys_days{ymd.year() / 1 / 1}).count();
        cloud = 0.35 + 0.65 * rng.next_uniform();
        for (int h = 0; h < 24; ++h) {
            const Timestamp ts = day + hours{h};
            ar = 0.7 * ar + std::sqrt(1.0 - 0.49) * rng.next_normal();
            double forecast = 0.0;
            double actual = 0.0;
            switch (kind) {
                case VariableKind::load:
                    forecast = load_shape(h, doy);
                    actual = forecast + 450.0 * ar;
                    break;
                case VariableKind::wind:
                    level = std::clamp(0.95 * level + 0.3 * rng.next_normal(), -2.5, 2.5);
                    forecast = std::clamp(wind_shape(h) + 900.0 * level, 100.0, kWindCapacity - 100.0);
                    actual = std::clamp(forecast + (150.0 + 0.1 * forecast) * ar, 0.0, kWindCapacity);
                    break;
                case VariableKind::solar:
                    forecast = kSolarCapacity * 0.7 * daylight(h) * cloud;
                    if (forecast > 0.0) actual = std::clamp(forecast + (0.12 * forecast + 40.0) * ar, 0.0, kSolarCapacity);
                    break;
                case VariableKind::net_demand:
                    throw std::invalid_argument("synthetic net demand history is derived from the others");
            }
            records.push_back({ts, forecast, actual});
        }
    }
    return HistoricalSeries(kind, std::move(records), minutes{60});
}

void write_fixture(const fs::path& dir, std::uint64_t seed) {
    fs::create_directories(dir);
    const Timestamp day = parse_timestamp("2020-07-01T00:00:00");
    const Timestamp hist_start = parse_timestamp("2019-07-02T00:00:00");
    write_forecast(dir / "solar_forecast.csv", solar_forecast(day));
    write_forecast(dir / "load_forecast.csv", load_forecast(day));
    write_forecast(dir / "wind_forecast.csv", wind_forecast(day));
    for (auto kind : {VariableKind::load, VariableKind::wind, VariableKind::solar}) {
        write_history(dir / (std::string(to_string(kind)) + "_history.csv"), history(kind, hist_start, 365, seed));
    }
    std::ofstream cfg(dir / "config.json");
    cfg << "{\n"
           "  \"solar_forecast\": \"solar_forecast.csv\",\n"
           "  \"load_forecast\": \"load_forecast.csv\",\n"
           "  \"wind_forecast\": \"wind_forecast.csv\",\n"
           "  \"solar_history\": \"solar_history.csv\",\n"
           "  \"load_history\": \"load_history.csv\",\n"
           "  \"wind_history\": \"wind_history.csv\"\n"
           "}\n";
    if (!cfg) throw std::runtime_error("cannot write " + (dir / "config.json").string());
}

}  // namespace dynreserve::synthetic
