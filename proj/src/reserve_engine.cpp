#include "dynreserve/reserve_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dynreserve/log.hpp"

namespace dynreserve {

std::string_view to_string(ExplanatoryKind kind) {
    switch (kind) {
        case ExplanatoryKind::magnitude: return "magnitude";
        case ExplanatoryKind::rate_of_change: return "rate";
        case ExplanatoryKind::hour_of_day: return "hour";
    }
    return "unknown";
}

ExplanatoryKind parse_explanatory_kind(std::string_view text) {
    if (text == "magnitude") return ExplanatoryKind::magnitude;
    if (text == "rate" || text == "rate_of_change") return ExplanatoryKind::rate_of_change;
    if (text == "hour" || text == "hour_of_day") return ExplanatoryKind::hour_of_day;
    throw std::invalid_argument("unknown explanatory variable '" + std::string(text) +
                                "' (expected magnitude|rate|hour)");
}

std::vector<double> explanatory_series(std::span<const double> forecast, std::span<const Timestamp> timestamps,
                                       ExplanatoryKind kind) {
    if (forecast.size() != timestamps.size()) {
        throw std::invalid_argument("explanatory series: values and timestamps differ in length");
    }
    const std::size_t n = forecast.size();
    std::vector<double> nu(n);
    switch (kind) {
        case ExplanatoryKind::magnitude:
            std::copy(forecast.begin(), forecast.end(), nu.begin());
            break;
        case ExplanatoryKind::rate_of_change:
            if (n == 1) {
                nu[0] = 0.0;
                break;
            }
            nu[0] = forecast[1] - forecast[0];
            for (std::size_t i = 1; i < n; ++i) nu[i] = forecast[i] - forecast[i - 1];
            break;
        case ExplanatoryKind::hour_of_day:
            for (std::size_t i = 0; i < n; ++i) nu[i] = hour_of_day(timestamps[i]);
            break;
    }
    return nu;
}

std::vector<double> explanatory_series(std::span<const double> forecast, const TimeGrid& grid,
                                       ExplanatoryKind kind) {
    if (kind != ExplanatoryKind::hour_of_day) {
        const std::vector<Timestamp> none(forecast.size());
        return explanatory_series(forecast, none, kind);
    }
    return explanatory_series(forecast, grid.timestamps(), kind);
}

std::vector<double> compute_errors(const HistoricalSeries& history) {
    std::vector<double> errors;
    errors.reserve(history.size());
    for (const auto& r : history.records()) errors.push_back(r.actual - r.forecast);
    return errors;
}

DirectionalNeeds itemize(std::span<const double> errors, VariableKind kind) {
    DirectionalNeeds out;
    const bool production = is_production(kind);
    for (double e : errors) {
        if (e > 0.0) {
            (production ? out.down : out.up).push_back(e);
        } else if (e < 0.0) {
            (production ? out.up : out.down).push_back(-e);
        }
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double ci) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of an empty population");
    }
    if (!(ci >= 0.0 && ci <= 1.0)) {
        throw std::invalid_argument("quantile level must lie in [0,1]");
    }
    const std::size_t n = sorted.size();
    const double pos = static_cast<double>(n - 1) * ci;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    const double value = sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    return std::min(value, sorted[lo + 1]);
}

double quantile(std::span<const double> population, double ci) {
    std::vector<double> sorted(population.begin(), population.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, ci);
}

std::size_t ReserveModel::bin_index(double nu) const {
    const std::size_t bins = bin_count();
    if (collapsed_ || nu <= edges_.front()) return 0;
    const auto it = std::lower_bound(edges_.begin() + 1, edges_.end(), nu);
    if (it == edges_.end()) return bins - 1;
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

std::span<const double> ReserveModel::population(Direction dir, std::size_t b) const {
    return dir == Direction::up ? std::span<const double>(up_.at(b)) : std::span<const double>(down_.at(b));
}

std::span<const double> ReserveModel::effective_population(Direction dir, std::size_t b) const {
    const auto& source = dir == Direction::up ? up_source_ : down_source_;
    const std::size_t s = source.at(b);
    if (s == bin_count()) return {};
    return population(dir, s);
}

double ReserveModel::requirement(Direction dir, double nu, double ci) const {
    const auto pop = effective_population(dir, bin_index(nu));
    if (pop.empty()) return 0.0;
    return quantile_sorted(pop, ci);
}

namespace {

// For every bin, the nearest non-empty bin (lower index on ties), or
// `bins.size()` when all are empty.
std::vector<std::size_t> nearest_populated(const std::vector<std::vector<double>>& bins) {
    const std::size_t n = bins.size();
    std::vector<std::size_t> out(n, n);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t dist = 0; dist < n; ++dist) {
            if (b >= dist && !bins[b - dist].empty()) {
                out[b] = b - dist;
                break;
            }
            if (b + dist < n && !bins[b + dist].empty()) {
                out[b] = b + dist;
                break;
            }
        }
    }
    return out;
}

}  // namespace

ReserveModel build_model(const HistoricalSeries& history, ExplanatoryKind explanatory, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("reserve model needs at least one bin");
    }
    if (history.size() < 2) {
        throw std::invalid_argument("reserve model needs at least two historical records");
    }
    const std::vector<double> forecasts = history.forecasts();
    const std::vector<double> nu = explanatory_series(forecasts, history.timestamps(), explanatory);
    const std::vector<double> errors = compute_errors(history);

    ReserveModel model;
    model.kind_ = history.kind();
    model.explanatory_ = explanatory;
    const auto [lo_it, hi_it] = std::minmax_element(nu.begin(), nu.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi - lo > 0.0)) {
        log::warn("explanatory variable '" + std::string(to_string(explanatory)) +
                  "' has zero range; using a single bin");
        model.collapsed_ = true;
        bins = 1;
    }
    model.edges_.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        model.edges_[b] = lo + (static_cast<double>(b) / static_cast<double>(bins)) * (hi - lo);
    }
    model.up_.assign(bins, {});
    model.down_.assign(bins, {});
    const bool production = is_production(history.kind());
    for (std::size_t h = 0; h < errors.size(); ++h) {
        const double e = errors[h];
        if (e == 0.0) continue;
        const std::size_t b = model.bin_index(nu[h]);
        const bool up = (e > 0.0) != production;
        (up ? model.up_ : model.down_)[b].push_back(std::fabs(e));
    }
    for (auto& pop : model.up_) std::sort(pop.begin(), pop.end());
    for (auto& pop : model.down_) std::sort(pop.begin(), pop.end());
    model.up_source_ = nearest_populated(model.up_);
    model.down_source_ = nearest_populated(model.down_);
    if (model.up_source_.front() == bins) log::warn("no historical upward needs; upward requirements are 0");
    if (model.down_source_.front() == bins) log::warn("no historical downward needs; downward requirements are 0");
    return model;
}

ReserveProfile zero_profile(const TimeGrid& grid, std::string method) {
    ReserveProfile p;
    p.grid = grid;
    p.up.assign(grid.size, 0.0);
    p.down.assign(grid.size, 0.0);
    p.method = std::move(method);
    return p;
}

ReserveProfile requirements(const ReserveModel& model, std::span<const double> nu, double ci,
                            const TimeGrid& grid) {
    if (nu.size() != grid.size) {
        throw std::invalid_argument("explanatory series length does not match the time grid");
    }
    ReserveProfile p = zero_profile(grid, "deterministic");
    p.parameters["ci"] = ci;
    for (std::size_t t = 0; t < nu.size(); ++t) {
        p.up[t] = model.requirement(Direction::up, nu[t], ci);
        p.down[t] = model.requirement(Direction::down, nu[t], ci);
    }
    return p;
}

namespace {

// Squares summed in ascending order so the result is permutation invariant.
double root_sum_square(double a, double b, double c) {
    std::array<double, 3> sq{a * a, b * b, c * c};
    std::sort(sq.begin(), sq.end());
    return std::sqrt(sq[0] + sq[1] + sq[2]);
}

}  // namespace

ReserveProfile rss_combine(const ReserveProfile& load, const ReserveProfile& wind, const ReserveProfile& solar) {
    if (load.size() != wind.size() || load.size() != solar.size()) {
        throw std::invalid_argument("cannot combine reserve profiles of different horizons");
    }
    ReserveProfile out = zero_profile(load.grid, solar.method);
    out.parameters = solar.parameters;
    for (std::size_t t = 0; t < load.size(); ++t) {
        out.up[t] = root_sum_square(load.up[t], wind.up[t], solar.up[t]);
        out.down[t] = root_sum_square(load.down[t], wind.down[t], solar.down[t]);
    }
    return out;
}

}  // namespace dynreserve
