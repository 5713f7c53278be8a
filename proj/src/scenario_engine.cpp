#include "dynreserve/scenario_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynreserve/normal.hpp"
#include "dynreserve/reserve_engine.hpp"

namespace dynreserve {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct ScenarioDraw {
    std::vector<double> values;
    double log_weight = 0.0;
};

void correlate(const Matrix& factor, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<Eigen::Index>(x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k <= i; ++k) acc += factor(i, k) * x[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

void draw_gaussian(const Matrix& factor, std::uint64_t seed, std::size_t s, std::span<double> x,
                   std::span<double> y) {
    ScenarioStream stream(seed, s);
    for (auto& v : x) v = stream.next_normal();
    correlate(factor, x, y);
}

ScenarioDraw draw_scenario(const ProbabilisticForecast& forecast, const Matrix& factor, std::uint64_t seed,
                           std::size_t s) {
    const std::size_t horizon = forecast.horizon();
    std::vector<double> x(horizon), y(horizon);
    draw_gaussian(factor, seed, s, x, y);
    ScenarioDraw out;
    out.values.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        const IntervalCdf& cdf = forecast.interval(t);
        const double z = std_normal_cdf(y[t]);
        out.values[t] = cdf.inverse(z);
        out.log_weight += std::log(cdf.band_mass(z));
    }
    return out;
}

}  // namespace

ScenarioStream::ScenarioStream(std::uint64_t seed, std::uint64_t scenario_index)
    : state_(mix64(seed ^ scenario_index)) {}

std::uint64_t ScenarioStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double ScenarioStream::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double ScenarioStream::next_normal() { return std_normal_inv(next_uniform()); }

SampleMatrix correlated_normals(const Matrix& factor, std::size_t count, std::uint64_t seed, Execution exec) {
    const auto horizon = static_cast<std::size_t>(factor.rows());
    SampleMatrix y(static_cast<Eigen::Index>(count), factor.rows());
    auto row = [&](std::size_t s) {
        std::vector<double> x(horizon);
        std::span<double> out(y.row(static_cast<Eigen::Index>(s)).data(), horizon);
        draw_gaussian(factor, seed, s, x, out);
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t s = 0; s < count; ++s) row(s);
    } else {
        for (std::size_t s = 0; s < count; ++s) row(s);
    }
    return y;
}

std::vector<double> softmax_normalize(std::span<const double> log_weights) {
    if (log_weights.empty()) return {};
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> out(log_weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        out[i] = std::exp(log_weights[i] - top);
        total += out[i];
    }
    for (auto& v : out) v /= total;
    return out;
}

ScenarioSet generate_scenarios(const ProbabilisticForecast& forecast, std::size_t count,
                               const CopulaParams& params, std::uint64_t seed, Execution exec) {
    if (count == 0) {
        throw std::invalid_argument("empty scenario request");
    }
    const Matrix factor = cholesky(build_covariance(forecast.horizon(), params));

    std::vector<ScenarioDraw> draws(count);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t s = 0; s < count; ++s) draws[s] = draw_scenario(forecast, factor, seed, s);
    } else {
        for (std::size_t s = 0; s < count; ++s) draws[s] = draw_scenario(forecast, factor, seed, s);
    }

    std::vector<double> log_weights(count);
    for (std::size_t s = 0; s < count; ++s) log_weights[s] = draws[s].log_weight;
    const std::vector<double> probs = softmax_normalize(log_weights);

    ScenarioSet set;
    set.kind = forecast.kind();
    set.grid = forecast.grid();
    set.source_id = std::string(to_string(forecast.kind())) + "@" + format_timestamp(forecast.grid().start);
    set.seed = seed;
    set.params = params;
    set.scenarios.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
        set.scenarios[s].values = std::move(draws[s].values);
        set.scenarios[s].log_weight = log_weights[s];
        set.scenarios[s].probability = probs[s];
    }
    return set;
}

NetDemandScenarioSet combine_net_demand(const ScenarioSet& load, const ScenarioSet& wind,
                                        const ScenarioSet& solar, std::size_t cap) {
    if (load.horizon() != wind.horizon() || load.horizon() != solar.horizon()) {
        throw std::invalid_argument("load, wind and solar scenario horizons differ");
    }
    const std::size_t nl = load.size(), nw = wind.size(), ns = solar.size();
    const bool overflow = (nw != 0 && nl > std::numeric_limits<std::size_t>::max() / nw) ||
                          (ns != 0 && nl * nw > std::numeric_limits<std::size_t>::max() / ns);
    if (overflow || nl * nw * ns > cap) {
        throw std::length_error("net demand combination of " + std::to_string(nl) + "x" + std::to_string(nw) +
                                "x" + std::to_string(ns) + " scenarios exceeds the cap of " +
                                std::to_string(cap) + "; subsample the input sets first");
    }
    NetDemandScenarioSet out;
    out.grid = load.grid;
    out.scenarios.reserve(nl * nw * ns);
    const std::size_t horizon = load.horizon();
    for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nw; ++j) {
            for (std::size_t k = 0; k < ns; ++k) {
                NetDemandScenario n;
                n.load_index = i;
                n.wind_index = j;
                n.solar_index = k;
                n.values.resize(horizon);
                for (std::size_t t = 0; t < horizon; ++t) {
                    n.values[t] = load.scenarios[i].values[t] - wind.scenarios[j].values[t] -
                                  solar.scenarios[k].values[t];
                }
                n.probability = load.scenarios[i].probability * wind.scenarios[j].probability *
                                solar.scenarios[k].probability;
                out.scenarios.push_back(std::move(n));
            }
        }
    }
    return out;
}

CopulaParams LagCorrelationEstimate::params() const {
    CopulaParams p;
    p.theta = std::clamp(lag1, 0.0, 1.0);
    p.omega = std::max(lag1 - lag2, 0.0);
    return p;
}

LagCorrelationEstimate estimate_lag_correlations(const HistoricalSeries& history) {
    const std::vector<double> e = compute_errors(history);
    if (e.size() < 3) {
        throw std::invalid_argument("lag correlation estimate needs at least 3 records");
    }
    auto pearson = [&](std::size_t lag) {
        const std::size_t n = e.size() - lag;
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ma += e[i];
            mb += e[i + lag];
        }
        ma /= static_cast<double>(n);
        mb /= static_cast<double>(n);
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = e[i] - ma, b = e[i + lag] - mb;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
        return (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
    };
    return {pearson(1), pearson(2)};
}

}  // namespace dynreserve
