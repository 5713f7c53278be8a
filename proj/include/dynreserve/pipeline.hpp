#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynreserve/config.hpp"
#include "dynreserve/forecast_model.hpp"
#include "dynreserve/history.hpp"
#include "dynreserve/methods.hpp"
#include "dynreserve/reserve_engine.hpp"
#include "dynreserve/risk_engine.hpp"
#include "dynreserve/scenario_set.hpp"

namespace dynreserve {

struct Inputs {
    ProbabilisticForecast solar;
    std::optional<ProbabilisticForecast> load;
    std::optional<ProbabilisticForecast> wind;
    std::optional<HistoricalSeries> solar_history;
    std::optional<HistoricalSeries> load_history;
    std::optional<HistoricalSeries> wind_history;
    std::optional<HistoricalSeries> net_history;
    std::map<std::string, std::filesystem::path> files;  // role -> path, for hashing
};

// Loads every configured input and resamples all of them to the coarsest
// resolution present.
Inputs load_inputs(const RunConfig& cfg);

struct MomentRow {
    std::string scope;   // timestamp or "overall"
    std::string moment;  // mean|variance|skewness|excess_kurtosis
    std::optional<double> forecast;
    std::optional<double> scenarios;
    std::optional<double> nrmse_pct;
};

struct SensitivityRow {
    Timestamp timestamp;
    double ci = 0.0;
    double pi = 0.0;
    double det_up = 0.0;
    double det_down = 0.0;
    double pi_up = 0.0;
    double pi_down = 0.0;
};

/// Reserve computations over one set of inputs. Scenarios are generated on
/// first use only.
class Pipeline {
public:
    Pipeline(RunConfig cfg, Inputs inputs);

    const RunConfig& config() const { return cfg_; }
    const Inputs& inputs() const { return in_; }
    const TimeGrid& grid() const { return in_.solar.grid(); }

    bool scenarios_generated() const { return scenarios_.has_value(); }
    const ScenarioSet& scenarios();

    // Total requirement of one method: recursive load and wind components at
    // `ci` combined by root-sum-square with the method's solar component. The
    // risk-based method sizes the net-demand total directly and hybrid takes
    // the elementwise maximum over the other configured methods.
    MethodResult total(MethodId id);
    MethodResult total(MethodId id, double ci, double pi);

    bool has_risk_distribution() const { return net_dist_.has_value(); }
    const DeviationDistribution& deviation_distribution() const;
    RiskProfile assess(const ReserveProfile& profile) const;

    std::vector<MomentRow> moment_validation();
    std::vector<SensitivityRow> sensitivity();

private:
    ReserveProfile component(const std::optional<ReserveModel>& model, const std::optional<ProbabilisticForecast>& f,
                             double ci) const;
    ReserveProfile solar_component(MethodId id, double ci, double pi);
    const ExtremeSubsets& extremes();

    RunConfig cfg_;
    Inputs in_;
    std::optional<ReserveModel> load_model_;
    std::optional<ReserveModel> wind_model_;
    std::optional<ReserveModel> solar_model_;
    std::optional<DeviationDistribution> net_dist_;
    std::optional<ScenarioSet> scenarios_;
    std::optional<ExtremeSubsets> extremes_;
    std::map<MethodId, MethodResult> totals_;
};

struct RunManifest {
    std::string config_json;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
    std::vector<std::pair<std::string, std::string>> outputs;  // file name, sha256
    std::string version;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<std::pair<std::string, double>> timings;  // stage, seconds

    // Everything except the "runtime" block (threads, timings).
    std::string to_json(bool include_runtime = true) const;
};

std::string sha256_file(const std::filesystem::path& path);

/// Exclusive use of an output directory. Files registered through `track`
/// are deleted again unless `commit` is called before destruction.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir);
    ~OutputDir();
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    std::filesystem::path track(const std::string& name);
    const std::vector<std::filesystem::path>& files() const { return files_; }
    void commit() { committed_ = true; }

private:
    std::filesystem::path dir_;
    std::filesystem::path lock_;
    std::vector<std::filesystem::path> files_;
    bool committed_ = false;
};

void write_moments(const std::filesystem::path& path, const std::vector<MomentRow>& rows);
void write_sensitivity(const std::filesystem::path& path, const std::vector<SensitivityRow>& rows);
std::vector<MomentRow> load_moments(const std::filesystem::path& path);
std::vector<SensitivityRow> load_sensitivity(const std::filesystem::path& path);

// Full run: scenarios, every configured method, risk per method, moment
// validation, sensitivity grid and manifest.json. On failure the files written
// so far are removed and the error is rethrown with the stage name prefixed.
RunManifest run_pipeline(const RunConfig& cfg);

// Applies cfg.threads to the OpenMP runtime.
void apply_threads(int threads);

}  // namespace dynreserve
