#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynreserve/execution.hpp"
#include "dynreserve/time_grid.hpp"
#include "dynreserve/variable_kind.hpp"

namespace dynreserve {

struct ScenarioSet;

/// MW values on a regular time grid.
class TimeSeries {
public:
    TimeSeries(VariableKind kind, Timestamp start, std::chrono::minutes resolution,
               std::vector<double> values);

    VariableKind kind() const { return kind_; }
    const TimeGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    VariableKind kind_;
    TimeGrid grid_;
    std::vector<double> values_;
};

struct Threshold {
    double p;  // probability level in (0,1)
    double v;  // MW
};

/// Non-parametric CDF of one interval, given by quantile thresholds and
/// interpolated linearly between them. Outside the outermost thresholds the
/// CDF and its inverse clamp (no tail extrapolation).
///
/// A degenerate CDF carries all mass at a single value (night-time solar).
class IntervalCdf {
public:
    // Throws std::invalid_argument unless p is strictly increasing inside (0,1)
    // and v is non-decreasing. If every v is equal the CDF is degenerate.
    explicit IntervalCdf(std::vector<Threshold> thresholds);

    static IntervalCdf atom(double value);

    bool is_degenerate() const { return degenerate_; }
    std::span<const Threshold> thresholds() const { return thresholds_; }

    double p_min() const;
    double p_max() const;
    double v_min() const { return thresholds_.front().v; }
    double v_max() const { return thresholds_.back().v; }

    // F(v). Step function at the atom when degenerate.
    double eval(double v) const;
    // F^-1(z) for z in [0,1].
    double inverse(double z) const;
    // Probability mass of the forecast band that contains z: the gap between
    // consecutive levels, or p_min / 1 - p_max for the tails. 1 when degenerate.
    double band_mass(double z) const;

private:
    IntervalCdf() = default;

    std::vector<Threshold> thresholds_;
    bool degenerate_ = false;
};

class ProbabilisticForecast {
public:
    // Throws std::invalid_argument when the horizons differ or the central
    // value of some interval lies outside [F^-1(p_min), F^-1(p_max)].
    ProbabilisticForecast(TimeSeries central, std::vector<IntervalCdf> intervals);

    VariableKind kind() const { return central_.kind(); }
    std::size_t horizon() const { return intervals_.size(); }
    const TimeSeries& central() const { return central_; }
    const TimeGrid& grid() const { return central_.grid(); }
    const IntervalCdf& interval(std::size_t t) const { return intervals_[t]; }
    std::span<const IntervalCdf> intervals() const { return intervals_; }

private:
    TimeSeries central_;
    std::vector<IntervalCdf> intervals_;
};

// Below this variance skewness and kurtosis are reported as undefined.
inline constexpr double kDegenerateVariance = 1e-6;  // MW^2

struct IntervalMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::optional<double> excess_kurtosis;
};

using MomentSeries = std::vector<IntervalMoments>;

// Weighted central moments of a sample; weights must sum to one.
IntervalMoments weighted_moments(std::span<const double> values, std::span<const double> weights);

// Moments implied by each interval's piecewise-linear CDF, by midpoint
// quadrature over n_grid probability levels pushed through the inverse CDF.
MomentSeries forecast_moments(const ProbabilisticForecast& forecast, std::size_t n_grid = 10000,
                              Execution exec = Execution::parallel);

// Probability-weighted moments across scenarios, per interval.
MomentSeries scenario_moments(const ScenarioSet& set);

// 100 * RMSE(test - ref) / (max(ref) - min(ref)).
// Throws std::invalid_argument on length mismatch or "degenerate reference".
double nrmse_percent(std::span<const double> test, std::span<const double> ref);

}  // namespace dynreserve
