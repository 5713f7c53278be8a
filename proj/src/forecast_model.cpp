#include "dynreserve/forecast_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

std::string_view to_string(VariableKind kind) {
    switch (kind) {
        case VariableKind::load: return "load";
        case VariableKind::wind: return "wind";
        case VariableKind::solar: return "solar";
        case VariableKind::net_demand: return "net_demand";
    }
    return "unknown";
}

VariableKind parse_variable_kind(std::string_view text) {
    if (text == "load") return VariableKind::load;
    if (text == "wind") return VariableKind::wind;
    if (text == "solar") return VariableKind::solar;
    if (text == "net_demand" || text == "net-demand" || text == "net") return VariableKind::net_demand;
    throw std::invalid_argument("unknown variable kind '" + std::string(text) + "'");
}

TimeSeries::TimeSeries(VariableKind kind, Timestamp start, std::chrono::minutes resolution,
                       std::vector<double> values)
    : kind_(kind), grid_{start, resolution, values.size()}, values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("time series needs at least one value");
    }
    if (resolution.count() <= 0) {
        throw std::invalid_argument("time series resolution must be positive");
    }
    if (kind_ != VariableKind::net_demand) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] < 0.0) {
                throw std::invalid_argument(std::string(to_string(kind_)) + " value at " +
                                            format_timestamp(grid_.at(i)) + " is negative");
            }
        }
    }
}

IntervalCdf::IntervalCdf(std::vector<Threshold> thresholds) : thresholds_(std::move(thresholds)) {
    if (thresholds_.empty()) {
        throw std::invalid_argument("interval CDF needs at least one threshold");
    }
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        const auto& th = thresholds_[i];
        if (!(th.p > 0.0 && th.p < 1.0) || !std::isfinite(th.v)) {
            throw std::invalid_argument("threshold probability must lie in (0,1) with a finite value");
        }
        if (i > 0) {
            if (!(th.p > thresholds_[i - 1].p)) {
                throw std::invalid_argument("threshold probabilities must be strictly increasing");
            }
            if (th.v < thresholds_[i - 1].v) {
                throw std::invalid_argument("quantile crossing: value decreases between p=" +
                                            std::to_string(thresholds_[i - 1].p) + " and p=" +
                                            std::to_string(th.p));
            }
        }
    }
    degenerate_ = thresholds_.front().v == thresholds_.back().v;
}

IntervalCdf IntervalCdf::atom(double value) {
    IntervalCdf cdf;
    cdf.thresholds_ = {{0.5, value}};
    cdf.degenerate_ = true;
    return cdf;
}

double IntervalCdf::p_min() const { return degenerate_ ? 0.0 : thresholds_.front().p; }
double IntervalCdf::p_max() const { return degenerate_ ? 1.0 : thresholds_.back().p; }

double IntervalCdf::eval(double v) const {
    if (degenerate_) {
        return v < thresholds_.front().v ? 0.0 : 1.0;
    }
    if (v < v_min()) return thresholds_.front().p;
    if (v >= v_max()) return thresholds_.back().p;
    const auto hi = std::upper_bound(thresholds_.begin(), thresholds_.end(), v,
                                     [](double x, const Threshold& th) { return x < th.v; });
    const auto lo = hi - 1;
    return lo->p + (v - lo->v) / (hi->v - lo->v) * (hi->p - lo->p);
}

double IntervalCdf::inverse(double z) const {
    if (degenerate_) return thresholds_.front().v;
    if (z <= thresholds_.front().p) return v_min();
    if (z >= thresholds_.back().p) return v_max();
    const auto hi = std::upper_bound(thresholds_.begin(), thresholds_.end(), z,
                                     [](double x, const Threshold& th) { return x < th.p; });
    const auto lo = hi - 1;
    return lo->v + (z - lo->p) / (hi->p - lo->p) * (hi->v - lo->v);
}

double IntervalCdf::band_mass(double z) const {
    if (degenerate_) return 1.0;
    if (z < thresholds_.front().p) return thresholds_.front().p;
    if (z >= thresholds_.back().p) return 1.0 - thresholds_.back().p;
    const auto hi = std::upper_bound(thresholds_.begin(), thresholds_.end(), z,
                                     [](double x, const Threshold& th) { return x < th.p; });
    return hi->p - (hi - 1)->p;
}

ProbabilisticForecast::ProbabilisticForecast(TimeSeries central, std::vector<IntervalCdf> intervals)
    : central_(std::move(central)), intervals_(std::move(intervals)) {
    if (central_.size() != intervals_.size()) {
        throw std::invalid_argument("central forecast and interval CDFs differ in length");
    }
    for (std::size_t t = 0; t < intervals_.size(); ++t) {
        const auto& cdf = intervals_[t];
        const double c = central_[t];
        const double tol = 1e-9 * (1.0 + std::fabs(c));
        if (c < cdf.v_min() - tol || c > cdf.v_max() + tol) {
            throw std::invalid_argument("central forecast at " + format_timestamp(central_.grid().at(t)) +
                                        " lies outside the forecast envelope");
        }
    }
}

IntervalMoments weighted_moments(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size() || values.empty()) {
        throw std::invalid_argument("moments need equally sized, non-empty values and weights");
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        const double d2 = d * d;
        m2 += weights[i] * d2;
        m3 += weights[i] * d2 * d;
        m4 += weights[i] * d2 * d2;
    }
    IntervalMoments out;
    out.mean = mean;
    out.variance = m2;
    if (m2 >= kDegenerateVariance) {
        out.skewness = m3 / (m2 * std::sqrt(m2));
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

namespace {

IntervalMoments quadrature_moments(const IntervalCdf& cdf, std::size_t n_grid) {
    if (cdf.is_degenerate()) {
        return IntervalMoments{cdf.inverse(0.5), 0.0, std::nullopt, std::nullopt};
    }
    std::vector<double> values(n_grid);
    const double n = static_cast<double>(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        values[k] = cdf.inverse((static_cast<double>(k) + 0.5) / n);
    }
    const std::vector<double> weights(n_grid, 1.0 / n);
    return weighted_moments(values, weights);
}

}  // namespace

MomentSeries forecast_moments(const ProbabilisticForecast& forecast, std::size_t n_grid, Execution exec) {
    if (n_grid < 100) {
        throw std::invalid_argument("moment quadrature needs at least 100 grid points");
    }
    const std::size_t horizon = forecast.horizon();
    MomentSeries out(horizon);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t t = 0; t < horizon; ++t) {
            out[t] = quadrature_moments(forecast.interval(t), n_grid);
        }
    } else {
        for (std::size_t t = 0; t < horizon; ++t) {
            out[t] = quadrature_moments(forecast.interval(t), n_grid);
        }
    }
    return out;
}

MomentSeries scenario_moments(const ScenarioSet& set) {
    if (set.scenarios.empty()) {
        throw std::invalid_argument("scenario moments need at least one scenario");
    }
    std::vector<double> probs;
    probs.reserve(set.size());
    for (const auto& s : set.scenarios) probs.push_back(s.probability);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("scenario probabilities do not sum to one");
    }
    const std::size_t horizon = set.scenarios.front().values.size();
    MomentSeries out(horizon);
    std::vector<double> column(set.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t s = 0; s < set.size(); ++s) column[s] = set.scenarios[s].values[t];
        out[t] = weighted_moments(column, probs);
    }
    return out;
}

double nrmse_percent(std::span<const double> test, std::span<const double> ref) {
    if (test.size() != ref.size() || ref.empty()) {
        throw std::invalid_argument("nrmse needs equally sized, non-empty series");
    }
    const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) {
        throw std::invalid_argument("degenerate reference");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = test[i] - ref[i];
        sq += d * d;
    }
    return 100.0 * std::sqrt(sq / static_cast<double>(ref.size())) / range;
}

}  // namespace dynreserve
