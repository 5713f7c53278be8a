#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dynreserve/time_grid.hpp"
#include "dynreserve/variable_kind.hpp"

namespace dynreserve {

enum class CovarianceRepair {
    // Nearest correlation matrix keeping the unit diagonal and the lag-1 band
    // fixed at theta.
    preserve_lag1,
    // Clip eigenvalues at the jitter floor, then rescale to unit diagonal.
    eigen_clip,
};

struct CopulaParams {
    double theta = 0.92;   // lag-1 correlation
    double omega = 0.42;   // linear decay per additional lag
    double jitter = 1e-10; // eigenvalue floor used by the repair
    CovarianceRepair repair = CovarianceRepair::preserve_lag1;

    void validate() const;
};

struct Scenario {
    std::vector<double> values;  // MW per interval
    double log_weight = 0.0;
    double probability = 0.0;
};

struct ScenarioSet {
    VariableKind kind = VariableKind::solar;
    TimeGrid grid;
    std::string source_id;
    std::uint64_t seed = 0;
    CopulaParams params;
    std::vector<Scenario> scenarios;

    std::size_t size() const { return scenarios.size(); }
    std::size_t horizon() const { return grid.size; }
};

struct NetDemandScenario {
    std::size_t load_index = 0;
    std::size_t wind_index = 0;
    std::size_t solar_index = 0;
    std::vector<double> values;
    double probability = 0.0;
};

struct NetDemandScenarioSet {
    TimeGrid grid;
    std::vector<NetDemandScenario> scenarios;
};

}  // namespace dynreserve
