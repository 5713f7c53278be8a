#include "dynreserve/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <omp.h>
#include <openssl/evp.h>

#include "json.hpp"

#include "dynreserve/csv_io.hpp"
#include "dynreserve/log.hpp"
#include "dynreserve/scenario_engine.hpp"
#include "dynreserve/version.hpp"

namespace dynreserve {

namespace fs = std::filesystem;

namespace {

std::optional<ProbabilisticForecast> maybe_forecast(const fs::path& p, VariableKind kind) {
    if (p.empty()) return std::nullopt;
    return load_forecast(p, kind);
}

std::optional<HistoricalSeries> maybe_history(const fs::path& p, VariableKind kind) {
    if (p.empty()) return std::nullopt;
    return load_history(p, kind);
}

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const std::domain_error& e) {
        throw std::domain_error(name + ": " + e.what());
    } catch (const std::length_error& e) {
        throw std::length_error(name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(name + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
}

}  // namespace

Inputs load_inputs(const RunConfig& cfg) {
    auto solar = load_forecast(cfg.solar_forecast, VariableKind::solar,
                               cfg.quantile_levels.empty() ? std::nullopt
                                                           : std::optional<std::vector<double>>(cfg.quantile_levels));
    Inputs in{std::move(solar),
              maybe_forecast(cfg.load_forecast, VariableKind::load),
              maybe_forecast(cfg.wind_forecast, VariableKind::wind),
              maybe_history(cfg.solar_history, VariableKind::solar),
              maybe_history(cfg.load_history, VariableKind::load),
              maybe_history(cfg.wind_history, VariableKind::wind),
              maybe_history(cfg.net_history, VariableKind::net_demand),
              {}};

    auto target = in.solar.grid().resolution;
    for (const auto* f : {&in.load, &in.wind}) {
        if (*f) target = std::max(target, (*f)->grid().resolution);
    }
    for (const auto* h : {&in.solar_history, &in.load_history, &in.wind_history, &in.net_history}) {
        if (*h) target = std::max(target, (*h)->resolution());
    }
    bool resampled = false;
    auto rf = [&](ProbabilisticForecast& f) {
        if (f.grid().resolution != target) {
            f = resample_forecast(f, target);
            resampled = true;
        }
    };
    auto rh = [&](std::optional<HistoricalSeries>& h) {
        if (h && h->resolution() != target) {
            h = resample_history(*h, target);
            resampled = true;
        }
    };
    rf(in.solar);
    if (in.load) rf(*in.load);
    if (in.wind) rf(*in.wind);
    rh(in.solar_history);
    rh(in.load_history);
    rh(in.wind_history);
    rh(in.net_history);
    if (resampled) log::info("mixed resolutions: inputs resampled to " + std::to_string(target.count()) + " minutes");

    for (const auto* f : {&in.load, &in.wind}) {
        if (*f && !((*f)->grid() == in.solar.grid())) {
            throw std::invalid_argument(std::string(to_string((*f)->kind())) +
                                        " forecast grid does not match the solar forecast grid");
        }
    }
    if (!in.net_history && in.load_history && in.wind_history && in.solar_history) {
        in.net_history = combine_net_demand_history(*in.load_history, *in.wind_history, *in.solar_history);
    }

    const std::pair<const char*, const fs::path*> roles[] = {
        {"solar_forecast", &cfg.solar_forecast}, {"load_forecast", &cfg.load_forecast},
        {"wind_forecast", &cfg.wind_forecast},   {"solar_history", &cfg.solar_history},
        {"load_history", &cfg.load_history},     {"wind_history", &cfg.wind_history},
        {"net_history", &cfg.net_history}};
    for (const auto& [role, path] : roles) {
        if (!path->empty()) in.files[role] = *path;
    }
    return in;
}

Pipeline::Pipeline(RunConfig cfg, Inputs inputs) : cfg_(std::move(cfg)), in_(std::move(inputs)) {
    if (in_.load_history && in_.load) load_model_ = build_model(*in_.load_history, cfg_.load_explanatory, cfg_.bins);
    if (in_.wind_history && in_.wind) wind_model_ = build_model(*in_.wind_history, cfg_.wind_explanatory, cfg_.bins);
    if (in_.solar_history) solar_model_ = build_model(*in_.solar_history, cfg_.solar_explanatory, cfg_.bins);
    if (in_.net_history) net_dist_ = build_deviation_distribution(*in_.net_history, cfg_.risk_grouping);
    if (!load_model_) log::warn("no load forecast/history pair; load reserve component is 0");
    if (!wind_model_) log::warn("no wind forecast/history pair; wind reserve component is 0");
}

const ScenarioSet& Pipeline::scenarios() {
    if (!scenarios_) {
        scenarios_ = generate_scenarios(in_.solar, cfg_.scenarios, cfg_.copula, cfg_.seed);
        scenarios_->source_id = cfg_.solar_forecast.filename().string();
    }
    return *scenarios_;
}

const ExtremeSubsets& Pipeline::extremes() {
    if (!extremes_) {
        const auto& set = scenarios();
        extremes_ = select_extremes(set, extreme_count(set.size(), cfg_.extreme_fraction), cfg_.score_by);
    }
    return *extremes_;
}

ReserveProfile Pipeline::component(const std::optional<ReserveModel>& model,
                                   const std::optional<ProbabilisticForecast>& f, double ci) const {
    if (!model || !f) return zero_profile(grid(), "none");
    return method_deterministic(*f, *model, ci).profile;
}

ReserveProfile Pipeline::solar_component(MethodId id, double ci, double pi) {
    const bool recursive = id == MethodId::deterministic || id == MethodId::all_scenarios ||
                           id == MethodId::extreme_scenarios;
    if (recursive && !solar_model_) {
        throw std::invalid_argument("method '" + std::string(to_string(id)) + "' needs a solar history");
    }
    switch (id) {
        case MethodId::deterministic: return method_deterministic(in_.solar, *solar_model_, ci).profile;
        case MethodId::all_scenarios: return method_all_scenarios(scenarios(), *solar_model_, ci).profile;
        case MethodId::extreme_scenarios:
            return method_extreme_scenarios(scenarios(), extremes(), *solar_model_, ci).profile;
        case MethodId::bounds: return method_bounds(scenarios(), extremes(), in_.solar).profile;
        case MethodId::prediction_interval: return method_prediction_interval(in_.solar, pi, cfg_.pi_mode).profile;
        default: break;
    }
    throw std::invalid_argument("no solar component for method '" + std::string(to_string(id)) + "'");
}

MethodResult Pipeline::total(MethodId id) {
    if (auto it = totals_.find(id); it != totals_.end()) return it->second;
    auto r = total(id, cfg_.ci, cfg_.pi);
    totals_.emplace(id, r);
    return r;
}

MethodResult Pipeline::total(MethodId id, double ci, double pi) {
    if (id == MethodId::risk_based) {
        MethodResult r{id, size_to_risk(deviation_distribution(), cfg_.risk_limit, grid()), "net demand deviations"};
        r.profile.method = "risk";
        return r;
    }
    if (id == MethodId::hybrid) {
        std::vector<MethodResult> parts;
        for (MethodId m : cfg_.methods) {
            if (m != MethodId::hybrid) parts.push_back(ci == cfg_.ci && pi == cfg_.pi ? total(m) : total(m, ci, pi));
        }
        if (parts.empty()) throw std::invalid_argument("hybrid needs at least one other method in the method list");
        return method_hybrid(parts);
    }
    const auto solar = solar_component(id, ci, pi);
    MethodResult r{id, rss_combine(component(load_model_, in_.load, ci), component(wind_model_, in_.wind, ci), solar),
                   "rss(load, wind, solar)"};
    r.profile.method = std::string(to_string(id));
    r.profile.parameters = solar.parameters;
    r.profile.parameters["ci"] = ci;
    return r;
}

const DeviationDistribution& Pipeline::deviation_distribution() const {
    if (!net_dist_) throw std::invalid_argument("risk needs a net demand history (or load, wind and solar histories)");
    return *net_dist_;
}

RiskProfile Pipeline::assess(const ReserveProfile& profile) const { return risk(deviation_distribution(), profile); }

std::vector<MomentRow> Pipeline::moment_validation() {
    const auto fm = forecast_moments(in_.solar, cfg_.moment_grid);
    const auto sm = scenario_moments(scenarios());
    const char* names[] = {"mean", "variance", "skewness", "excess_kurtosis"};
    auto pick = [](const IntervalMoments& m, int k) -> std::optional<double> {
        switch (k) {
            case 0: return m.mean;
            case 1: return m.variance;
            case 2: return m.skewness;
            default: return m.excess_kurtosis;
        }
    };

    std::vector<MomentRow> rows;
    for (std::size_t t = 0; t < fm.size(); ++t) {
        for (int k = 0; k < 4; ++k) {
            rows.push_back({format_timestamp(grid().at(t)), names[k], pick(fm[t], k), pick(sm[t], k), std::nullopt});
        }
    }
    for (int k = 0; k < 4; ++k) {
        std::vector<double> ref, test;
        for (std::size_t t = 0; t < fm.size(); ++t) {
            const auto a = pick(fm[t], k);
            const auto b = pick(sm[t], k);
            if (a && b) {
                ref.push_back(*a);
                test.push_back(*b);
            }
        }
        std::optional<double> score;
        if (!ref.empty()) {
            try {
                score = nrmse_percent(test, ref);
            } catch (const std::invalid_argument& e) {
                log::warn(std::string("moment validation, ") + names[k] + ": " + e.what());
            }
        }
        rows.push_back({"overall", names[k], std::nullopt, std::nullopt, score});
    }
    return rows;
}

std::vector<SensitivityRow> Pipeline::sensitivity() {
    std::vector<SensitivityRow> rows;
    std::vector<std::tuple<double, double, ReserveProfile, ReserveProfile>> grid_results;
    for (double ci : cfg_.sensitivity_ci) {
        const auto det = total(MethodId::deterministic, ci, cfg_.pi).profile;
        for (double pi : cfg_.sensitivity_pi) {
            grid_results.emplace_back(ci, pi, det, total(MethodId::prediction_interval, ci, pi).profile);
        }
    }
    for (std::size_t t = 0; t < grid().size; ++t) {
        for (const auto& [ci, pi, det, pip] : grid_results) {
            rows.push_back({grid().at(t), ci, pi, det.up[t], det.down[t], pip.up[t], pip.down[t]});
        }
    }
    return rows;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::string RunManifest::to_json(bool include_runtime) const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["seed"] = seed;
    j["config"] = nlohmann::ordered_json::parse(config_json);
    j["config"].erase("threads");
    auto list = [](const auto& pairs, const char* key) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [name, hash] : pairs) arr.push_back({{key, name}, {"sha256", hash}});
        return arr;
    };
    j["inputs"] = list(inputs, "path");
    j["outputs"] = list(outputs, "file");
    if (include_runtime) {
        j["runtime"]["threads"] = threads;
        auto t = nlohmann::ordered_json::object();
        for (const auto& [name, secs] : timings) t[name] = secs;
        j["runtime"]["timings_s"] = t;
    }
    return j.dump(2);
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    lock_ = dir_ / ".dynreserve.lock";
    std::FILE* f = std::fopen(lock_.c_str(), "wx");
    if (!f) {
        throw std::runtime_error("output directory " + dir_.string() + " is in use (remove " + lock_.string() +
                                 " if no other run is active)");
    }
    std::fclose(f);
}

OutputDir::~OutputDir() {
    std::error_code ec;
    if (!committed_) {
        for (const auto& f : files_) {
            if (fs::is_regular_file(f, ec)) fs::remove(f, ec);
        }
    }
    fs::remove(lock_, ec);
}

fs::path OutputDir::track(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::optional<double> opt_parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_number(s);
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::invalid_argument(path.string() + ": expected header '" + header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    return rows;
}

constexpr const char* kMomentHeader = "scope,moment,forecast,scenarios,nrmse_pct";
constexpr const char* kSensitivityHeader = "timestamp,ci,pi,det_r_up,det_r_dn,pi_r_up,pi_r_dn";

}  // namespace

void write_moments(const fs::path& path, const std::vector<MomentRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kMomentHeader << '\n';
    for (const auto& r : rows) {
        out << r.scope << ',' << r.moment << ',' << opt_number(r.forecast) << ',' << opt_number(r.scenarios) << ','
            << opt_number(r.nrmse_pct) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<MomentRow> load_moments(const fs::path& path) {
    std::vector<MomentRow> out;
    for (const auto& f : read_rows(path, kMomentHeader)) {
        if (f.size() != 5) throw std::invalid_argument(path.string() + ": expected 5 fields");
        out.push_back({f[0], f[1], opt_parse(f[2]), opt_parse(f[3]), opt_parse(f[4])});
    }
    return out;
}

void write_sensitivity(const fs::path& path, const std::vector<SensitivityRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kSensitivityHeader << '\n';
    for (const auto& r : rows) {
        out << format_timestamp(r.timestamp) << ',' << format_number(r.ci) << ',' << format_number(r.pi) << ','
            << format_number(r.det_up) << ',' << format_number(r.det_down) << ',' << format_number(r.pi_up) << ','
            << format_number(r.pi_down) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<SensitivityRow> load_sensitivity(const fs::path& path) {
    std::vector<SensitivityRow> out;
    for (const auto& f : read_rows(path, kSensitivityHeader)) {
        if (f.size() != 7) throw std::invalid_argument(path.string() + ": expected 7 fields");
        out.push_back({parse_timestamp(f[0]), parse_number(f[1]), parse_number(f[2]), parse_number(f[3]),
                       parse_number(f[4]), parse_number(f[5]), parse_number(f[6])});
    }
    return out;
}

void apply_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

RunManifest run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    apply_threads(cfg.threads);
    RunManifest manifest;
    manifest.config_json = config_to_json(cfg);
    manifest.version = kVersion;
    manifest.seed = cfg.seed;
    manifest.threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

    auto timed = [&](const std::string& name, auto&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        stage(name, [&] {
            f();
            return 0;
        });
        manifest.timings.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    };

    OutputDir out(cfg.output_dir);
    std::optional<Pipeline> pipe;
    timed("inputs", [&] { pipe.emplace(cfg, load_inputs(cfg)); });

    if (cfg.needs_scenarios()) {
        timed("scenarios", [&] {
            const auto& set = pipe->scenarios();
            const auto path = out.track("scenarios.csv");
            out.track("scenarios.meta.json");
            write_scenarios(path, set);
        });
    }
    for (MethodId id : cfg.methods) {
        const std::string name(to_string(id));
        timed("method " + name, [&] {
            const auto result = pipe->total(id);
            write_reserves(out.track("reserves_" + name + ".csv"), result.profile);
            if (pipe->has_risk_distribution()) {
                write_risk(out.track("risk_" + name + ".csv"), pipe->assess(result.profile));
            }
        });
    }
    if (!pipe->has_risk_distribution()) log::warn("no net demand history; risk files skipped");
    if (pipe->scenarios_generated()) {
        timed("moments", [&] { write_moments(out.track("moments_validation.csv"), pipe->moment_validation()); });
    }
    if (pipe->inputs().solar_history) {
        timed("sensitivity", [&] { write_sensitivity(out.track("sensitivity.csv"), pipe->sensitivity()); });
    } else {
        log::warn("no solar history; sensitivity grid skipped");
    }

    stage("manifest", [&] {
        for (const auto& [role, path] : pipe->inputs().files) manifest.inputs.emplace_back(path.string(), sha256_file(path));
        std::vector<fs::path> files = out.files();
        std::sort(files.begin(), files.end());
        for (const auto& f : files) manifest.outputs.emplace_back(f.filename().string(), sha256_file(f));
        const auto path = out.track("manifest.json");
        std::ofstream m(path, std::ios::binary | std::ios::trunc);
        m << manifest.to_json() << '\n';
        if (!m) throw std::runtime_error("write failed for " + path.string());
        return 0;
    });
    out.commit();
    return manifest;
}

}  // namespace dynreserve
