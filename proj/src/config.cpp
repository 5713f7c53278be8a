#include "dynreserve/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dynreserve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_probability(double v, const char* key) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(std::string("config: '") + key + "' must lie in (0,1)");
}

std::string repair_name(CovarianceRepair r) { return r == CovarianceRepair::eigen_clip ? "eigen_clip" : "preserve_lag1"; }

CovarianceRepair parse_repair(const std::string& s) {
    if (s == "preserve_lag1") return CovarianceRepair::preserve_lag1;
    if (s == "eigen_clip") return CovarianceRepair::eigen_clip;
    throw std::invalid_argument("config: 'repair' must be preserve_lag1 or eigen_clip");
}

std::string group_name(GroupKey k) { return k == GroupKey::pooled ? "pooled" : "hour"; }

GroupKey parse_group(const std::string& s) {
    if (s == "hour") return GroupKey::hour_of_day;
    if (s == "pooled") return GroupKey::pooled;
    throw std::invalid_argument("config: 'risk_grouping' must be hour or pooled");
}

}  // namespace

void RunConfig::validate() const {
    copula.validate();
    if (scenarios < 1) throw std::invalid_argument("config: 'scenarios' must be >= 1");
    if (bins < 1) throw std::invalid_argument("config: 'bins' must be >= 1");
    check_probability(ci, "ci");
    check_probability(pi, "pi");
    if (!(extreme_fraction > 0.0 && extreme_fraction <= 1.0)) {
        throw std::invalid_argument("config: 'extreme_fraction' must lie in (0,1]");
    }
    if (!(risk_limit >= 0.0)) throw std::invalid_argument("config: 'risk_limit' must be >= 0");
    if (methods.empty()) throw std::invalid_argument("config: 'methods' is empty");
    if (moment_grid < 100) throw std::invalid_argument("config: 'moment_grid' must be >= 100");
    if (threads < 0) throw std::invalid_argument("config: 'threads' must be >= 0");
    for (double p : quantile_levels) check_probability(p, "quantile_levels");
    for (double p : sensitivity_ci) check_probability(p, "sensitivity_ci");
    for (double p : sensitivity_pi) check_probability(p, "sensitivity_pi");
    if (!std::is_sorted(quantile_levels.begin(), quantile_levels.end())) {
        throw std::invalid_argument("config: 'quantile_levels' must be increasing");
    }
    if (solar_forecast.empty()) throw std::invalid_argument("config: 'solar_forecast' is required");
}

bool RunConfig::needs_scenarios() const {
    return std::any_of(methods.begin(), methods.end(), [](MethodId m) {
        return m == MethodId::all_scenarios || m == MethodId::extreme_scenarios || m == MethodId::bounds;
    });
}

void apply_config_json(RunConfig& cfg, const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");

    auto path_of = [&](const json& v) {
        fs::path p = v.get<std::string>();
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "solar_forecast") cfg.solar_forecast = path_of(v);
            else if (key == "load_forecast") cfg.load_forecast = path_of(v);
            else if (key == "wind_forecast") cfg.wind_forecast = path_of(v);
            else if (key == "solar_history") cfg.solar_history = path_of(v);
            else if (key == "load_history") cfg.load_history = path_of(v);
            else if (key == "wind_history") cfg.wind_history = path_of(v);
            else if (key == "net_history") cfg.net_history = path_of(v);
            else if (key == "output_dir") cfg.output_dir = path_of(v);
            else if (key == "quantile_levels") cfg.quantile_levels = v.get<std::vector<double>>();
            else if (key == "theta") cfg.copula.theta = v.get<double>();
            else if (key == "omega") cfg.copula.omega = v.get<double>();
            else if (key == "jitter") cfg.copula.jitter = v.get<double>();
            else if (key == "repair") cfg.copula.repair = parse_repair(v.get<std::string>());
            else if (key == "scenarios") cfg.scenarios = v.get<std::size_t>();
            else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "bins") cfg.bins = v.get<std::size_t>();
            else if (key == "ci") cfg.ci = v.get<double>();
            else if (key == "pi") cfg.pi = v.get<double>();
            else if (key == "extreme_fraction") cfg.extreme_fraction = v.get<double>();
            else if (key == "risk_limit") cfg.risk_limit = v.get<double>();
            else if (key == "threads") cfg.threads = v.get<int>();
            else if (key == "moment_grid") cfg.moment_grid = v.get<std::size_t>();
            else if (key == "sensitivity_ci") cfg.sensitivity_ci = v.get<std::vector<double>>();
            else if (key == "sensitivity_pi") cfg.sensitivity_pi = v.get<std::vector<double>>();
            else if (key == "load_explanatory") cfg.load_explanatory = parse_explanatory_kind(v.get<std::string>());
            else if (key == "wind_explanatory") cfg.wind_explanatory = parse_explanatory_kind(v.get<std::string>());
            else if (key == "solar_explanatory") cfg.solar_explanatory = parse_explanatory_kind(v.get<std::string>());
            else if (key == "score_by") cfg.score_by = parse_explanatory_kind(v.get<std::string>());
            else if (key == "pi_mode") {
                const auto s = v.get<std::string>();
                if (s != "relative" && s != "literal") throw std::invalid_argument("must be relative or literal");
                cfg.pi_mode = s == "literal" ? PiMode::literal : PiMode::relative;
            } else if (key == "risk_grouping") cfg.risk_grouping = parse_group(v.get<std::string>());
            else if (key == "methods") {
                cfg.methods.clear();
                for (const auto& m : v) cfg.methods.push_back(parse_method(m.get<std::string>()));
            } else {
                throw std::invalid_argument("unknown key");
            }
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: '" + key + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            if (msg.rfind("config:", 0) == 0) throw;
            throw std::invalid_argument("config: '" + key + "': " + msg);
        }
    }
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    apply_config_json(cfg, ss.str(), path.parent_path());
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["solar_forecast"] = cfg.solar_forecast.string();
    j["load_forecast"] = cfg.load_forecast.string();
    j["wind_forecast"] = cfg.wind_forecast.string();
    j["solar_history"] = cfg.solar_history.string();
    j["load_history"] = cfg.load_history.string();
    j["wind_history"] = cfg.wind_history.string();
    j["net_history"] = cfg.net_history.string();
    j["output_dir"] = cfg.output_dir.string();
    j["quantile_levels"] = cfg.quantile_levels;
    j["theta"] = cfg.copula.theta;
    j["omega"] = cfg.copula.omega;
    j["jitter"] = cfg.copula.jitter;
    j["repair"] = repair_name(cfg.copula.repair);
    j["scenarios"] = cfg.scenarios;
    j["seed"] = cfg.seed;
    j["bins"] = cfg.bins;
    j["ci"] = cfg.ci;
    j["pi"] = cfg.pi;
    j["extreme_fraction"] = cfg.extreme_fraction;
    j["risk_limit"] = cfg.risk_limit;
    std::vector<std::string> methods;
    for (auto m : cfg.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["threads"] = cfg.threads;
    j["load_explanatory"] = std::string(to_string(cfg.load_explanatory));
    j["wind_explanatory"] = std::string(to_string(cfg.wind_explanatory));
    j["solar_explanatory"] = std::string(to_string(cfg.solar_explanatory));
    j["score_by"] = std::string(to_string(cfg.score_by));
    j["pi_mode"] = cfg.pi_mode == PiMode::literal ? "literal" : "relative";
    j["risk_grouping"] = group_name(cfg.risk_grouping);
    j["moment_grid"] = cfg.moment_grid;
    j["sensitivity_ci"] = cfg.sensitivity_ci;
    j["sensitivity_pi"] = cfg.sensitivity_pi;
    return j.dump(2);
}

}  // namespace dynreserve
