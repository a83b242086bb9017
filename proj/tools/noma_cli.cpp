// Command-line runner for the experiments.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "noma/experiment.hpp"

namespace {

struct Logger {
    bool color;

    static Logger from_env() {
        const char* nc = std::getenv("NO_COLOR");
        return {!(nc && *nc) && isatty(STDERR_FILENO)};
    }

    void line(const char* tag, const char* ansi, const std::string& msg) const {
        if (color) {
            std::cerr << ansi << tag << "\033[0m " << msg << '\n';
        } else {
            std::cerr << tag << ' ' << msg << '\n';
        }
    }
    void info(const std::string& m) const { line("[info]", "\033[32m", m); }
    void warn(const std::string& m) const { line("[warn]", "\033[33m", m); }
    void error(const std::string& m) const { line("[error]", "\033[31m", m); }
};

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> tau_grid;
    bool ideal = false;
    bool serial = false;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace noma::cli;
    const Logger log = Logger::from_env();

    CLI::App app{"Uplink NOMA power control under PA distortion"};
    app.require_subcommand(1);
    Options opt;
    for (const char* name : {"fit", "region", "wsr", "sumrate", "ofdm", "dpd-sweep"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", opt.config, "config file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--tau-grid", opt.tau_grid, "rate-profile points per order")
            ->check(CLI::Range(2, 100000));
        sub->add_flag("--ideal", opt.ideal, "use an ideal PA (a = 0) as the true model");
        sub->add_flag("--serial", opt.serial, "run sweeps on one thread");
    }
    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
        if (opt.seed) {
            cfg.seed = *opt.seed;
            cfg.solver.seed = *opt.seed;
        }
        if (opt.tau_grid) cfg.solver.tau_grid = *opt.tau_grid;
        if (opt.ideal) cfg.force_ideal = true;

        log.info("running " + name + (opt.config.empty() ? " with defaults" : " from " + opt.config));
        const auto result = run_experiment(parse_kind(name), cfg, opt.out, !opt.serial);
        for (const auto& f : result.files) log.info("wrote " + f.string());
        for (const auto& d : result.diagnostics) log.warn(d);
        if (result.exit_code != 0) log.error(name + " finished with solver failures");
        return result.exit_code;
    } catch (const std::exception& e) {
        log.error(e.what());
        return 1;
    }
}
