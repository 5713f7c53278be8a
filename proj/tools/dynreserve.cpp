// dynreserve: scenario-based dynamic reserve sizing.
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dynreserve/config.hpp"
#include "dynreserve/csv_io.hpp"
#include "dynreserve/log.hpp"
#include "dynreserve/pipeline.hpp"
#include "dynreserve/version.hpp"

namespace fs = std::filesystem;
using namespace dynreserve;

namespace {

// Flag values; applied on top of the config file only when given.
struct Overrides {
    std::string config;
    std::vector<std::function<void(RunConfig&)>> apply;
};

template <class T, class Setter>
void override_opt(CLI::App& app, Overrides& ov, const std::string& flag, const std::string& help, Setter set) {
    auto value = std::make_shared<T>();
    auto* opt = app.add_option(flag, *value, help);
    ov.apply.push_back([value, opt, set](RunConfig& cfg) {
        if (opt->count() > 0) set(cfg, *value);
    });
}

RunConfig resolve(const Overrides& ov) {
    RunConfig cfg = ov.config.empty() ? RunConfig{} : load_config(ov.config);
    for (const auto& f : ov.apply) f(cfg);
    return cfg;
}

Pipeline open_pipeline(const RunConfig& cfg) {
    cfg.validate();
    apply_threads(cfg.threads);
    return Pipeline(cfg, load_inputs(cfg));
}

void report(const fs::path& p) { std::cout << p.string() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic operating reserve sizing from probabilistic forecasts"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Overrides ov;
    app.add_option("--config", ov.config, "flat JSON run configuration")->check(CLI::ExistingFile);
    auto path_opt = [&](const std::string& flag, fs::path RunConfig::*member, const std::string& help) {
        override_opt<std::string>(app, ov, flag, help, [member](RunConfig& c, const std::string& v) { c.*member = v; });
    };
    path_opt("--solar-forecast", &RunConfig::solar_forecast, "solar probabilistic forecast CSV");
    path_opt("--load-forecast", &RunConfig::load_forecast, "load forecast CSV");
    path_opt("--wind-forecast", &RunConfig::wind_forecast, "wind forecast CSV");
    path_opt("--solar-history", &RunConfig::solar_history, "solar history CSV");
    path_opt("--load-history", &RunConfig::load_history, "load history CSV");
    path_opt("--wind-history", &RunConfig::wind_history, "wind history CSV");
    path_opt("--net-history", &RunConfig::net_history, "net demand history CSV");
    path_opt("--out", &RunConfig::output_dir, "output directory");
    override_opt<int>(app, ov, "--threads", "OpenMP threads (0 = default)", [](RunConfig& c, int v) { c.threads = v; });
    override_opt<std::uint64_t>(app, ov, "--seed", "scenario seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; });
    override_opt<std::size_t>(app, ov, "--scenarios", "scenario count",
                              [](RunConfig& c, std::size_t v) { c.scenarios = v; });
    override_opt<std::size_t>(app, ov, "--bins", "explanatory bins", [](RunConfig& c, std::size_t v) { c.bins = v; });
    override_opt<std::string>(app, ov, "--explanatory", "magnitude|rate|hour for every component",
                              [](RunConfig& c, const std::string& v) {
                                  const auto kind = parse_explanatory_kind(v);
                                  c.load_explanatory = kind;
                                  c.wind_explanatory = kind;
                                  c.solar_explanatory = kind;
                              });
    override_opt<double>(app, ov, "--ci", "confidence level", [](RunConfig& c, double v) { c.ci = v; });
    override_opt<double>(app, ov, "--pi", "prediction interval", [](RunConfig& c, double v) { c.pi = v; });
    override_opt<double>(app, ov, "--extreme-frac", "extreme scenario fraction",
                         [](RunConfig& c, double v) { c.extreme_fraction = v; });
    override_opt<double>(app, ov, "--theta", "lag-1 correlation", [](RunConfig& c, double v) { c.copula.theta = v; });
    override_opt<double>(app, ov, "--omega", "correlation decay", [](RunConfig& c, double v) { c.copula.omega = v; });
    override_opt<std::vector<std::string>>(app, ov, "--methods", "method list", [](RunConfig& c, const auto& v) {
        c.methods.clear();
        for (const auto& m : v) c.methods.push_back(parse_method(m));
    });

    std::function<void()> action;

    auto* scen = app.add_subcommand("scenarios", "generate solar scenarios");
    scen->callback([&] {
        action = [&] {
            const auto cfg = resolve(ov);
            auto pipe = open_pipeline(cfg);
            OutputDir out(cfg.output_dir);
            const auto path = out.track("scenarios.csv");
            out.track("scenarios.meta.json");
            write_scenarios(path, pipe.scenarios());
            out.commit();
            report(path);
        };
    });

    auto* reserve = app.add_subcommand("reserve", "reserve requirements");
    reserve->require_subcommand(1);
    auto write_method = [&](MethodId id) {
        const auto cfg = resolve(ov);
        auto pipe = open_pipeline(cfg);
        const auto result = pipe.total(id);
        OutputDir out(cfg.output_dir);
        const auto path = out.track("reserves_" + std::string(to_string(id)) + ".csv");
        write_reserves(path, result.profile);
        out.commit();
        report(path);
    };
    reserve->add_subcommand("dynamic", "recursive baseline on the central forecasts")->callback([&] {
        action = [&] { write_method(MethodId::deterministic); };
    });
    auto* method = reserve->add_subcommand("method", "one reserve method");
    std::string method_name;
    method->add_option("--name", method_name, "all|extreme|bounds|pi|hybrid|deterministic|risk")->required();
    method->callback([&] { action = [&] { write_method(parse_method(method_name)); }; });

    auto* risk_cmd = app.add_subcommand("risk", "reserve risk");
    risk_cmd->require_subcommand(1);
    auto* assess = risk_cmd->add_subcommand("assess", "risk of an existing reserve profile");
    std::string reserves_file, history_file;
    assess->add_option("--reserves", reserves_file, "reserves CSV")->required()->check(CLI::ExistingFile);
    assess->add_option("--history", history_file, "net demand history CSV")->required()->check(CLI::ExistingFile);
    assess->callback([&] {
        action = [&] {
            const auto cfg = resolve(ov);
            const auto profile = load_reserves(reserves_file);
            const auto dist = build_deviation_distribution(load_history(history_file, VariableKind::net_demand),
                                                           cfg.risk_grouping);
            OutputDir out(cfg.output_dir);
            const auto path = out.track("risk_" + fs::path(reserves_file).stem().string() + ".csv");
            write_risk(path, risk(dist, profile));
            out.commit();
            report(path);
        };
    });
    auto* size = risk_cmd->add_subcommand("size", "smallest reserves meeting a risk ceiling");
    double limit = 100.0;
    auto* limit_opt = size->add_option("--limit", limit, "risk ceiling (expected-loss units), default from config")
                          ->check(CLI::NonNegativeNumber);
    size->callback([&] {
        action = [&] {
            auto cfg = resolve(ov);
            if (limit_opt->count() > 0) cfg.risk_limit = limit;
            auto pipe = open_pipeline(cfg);
            const auto result = pipe.total(MethodId::risk_based);
            OutputDir out(cfg.output_dir);
            const auto path = out.track("reserves_risk.csv");
            write_reserves(path, result.profile);
            out.commit();
            report(path);
        };
    });

    auto* validate = app.add_subcommand("validate", "validation reports");
    validate->require_subcommand(1);
    validate->add_subcommand("moments", "forecast vs scenario moments")->callback([&] {
        action = [&] {
            const auto cfg = resolve(ov);
            auto pipe = open_pipeline(cfg);
            const auto rows = pipe.moment_validation();
            OutputDir out(cfg.output_dir);
            const auto path = out.track("moments_validation.csv");
            write_moments(path, rows);
            out.commit();
            report(path);
        };
    });

    app.add_subcommand("sensitivity", "CI x PI grid")->callback([&] {
        action = [&] {
            const auto cfg = resolve(ov);
            auto pipe = open_pipeline(cfg);
            const auto rows = pipe.sensitivity();
            OutputDir out(cfg.output_dir);
            const auto path = out.track("sensitivity.csv");
            write_sensitivity(path, rows);
            out.commit();
            report(path);
        };
    });

    app.add_subcommand("run", "full pipeline")->callback([&] {
        action = [&] {
            const auto manifest = run_pipeline(resolve(ov));
            for (const auto& [name, hash] : manifest.outputs) std::cout << name << "  " << hash << '\n';
        };
    });

    try {
        app.parse(argc, argv);
        if (action) action();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
