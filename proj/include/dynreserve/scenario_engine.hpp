#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dynreserve/execution.hpp"
#include "dynreserve/forecast_model.hpp"
#include "dynreserve/history.hpp"
#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

using Matrix = Eigen::MatrixXd;
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Lag correlation matrix with entries max(theta - (L-1)*omega, 0) at lag L >= 1.
Matrix lag_correlation(std::size_t horizon, const CopulaParams& params);

// Returns `corr` unchanged when it is already positive definite (min eigenvalue
// >= jitter); otherwise a symmetric positive definite unit-diagonal repair.
Matrix repair_correlation(const Matrix& corr, double jitter, CovarianceRepair method);

// lag_correlation followed by repair_correlation.
Matrix build_covariance(std::size_t horizon, const CopulaParams& params);

// Lower-triangular C with C*C^T = a. Throws std::domain_error("matrix not
// positive definite") when a pivot is not positive.
Matrix cholesky(const Matrix& a);

// Counter-based stream: one independent substream per (seed, scenario index).
class ScenarioStream {
public:
    ScenarioStream(std::uint64_t seed, std::uint64_t scenario_index);

    std::uint64_t next_u64();
    double next_uniform();   // in (0,1), 53-bit resolution
    double next_normal();    // inverse-CDF transform of next_uniform()

private:
    std::uint64_t state_;
};

// Gaussian stage: row s is y_s = C x_s with x_s iid N(0,1) from substream s.
SampleMatrix correlated_normals(const Matrix& factor, std::size_t count, std::uint64_t seed,
                                Execution exec = Execution::parallel);

// Softmax in log space with max-shift; returns probabilities summing to one.
std::vector<double> softmax_normalize(std::span<const double> log_weights);

// Chronologically correlated scenarios from a probabilistic forecast.
// Throws std::invalid_argument("empty scenario request") when count == 0.
ScenarioSet generate_scenarios(const ProbabilisticForecast& forecast, std::size_t count,
                               const CopulaParams& params, std::uint64_t seed,
                               Execution exec = Execution::parallel);

// Every (load, wind, solar) combination with n = l - w - s and product
// probabilities. Throws std::length_error when |L|*|W|*|S| > cap and
// std::invalid_argument on horizon mismatch.
NetDemandScenarioSet combine_net_demand(const ScenarioSet& load, const ScenarioSet& wind,
                                        const ScenarioSet& solar, std::size_t cap);

// Convenience estimator: Pearson lag-1 and lag-2 autocorrelation of historical
// forecast errors, mapped to theta = lag1 and omega = max(lag1 - lag2, 0).
struct LagCorrelationEstimate {
    double lag1 = 0.0;
    double lag2 = 0.0;
    CopulaParams params() const;
};
LagCorrelationEstimate estimate_lag_correlations(const HistoricalSeries& history);

}  // namespace dynreserve
