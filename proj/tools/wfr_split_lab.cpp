// wfr-split-lab: experiment runner and validation front end.
//
//   wfr-split-lab <experiment> [--config PATH] [--out PATH] [--json]
//                 [--threads N] [--suite NAME] [key=value ...]
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error.

#include "wfrlab/config.hpp"
#include "wfrlab/errors.hpp"
#include "wfrlab/experiments.hpp"
#include "wfrlab/validate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw wfr::ConfigError("cannot write output file '" + path + "'");
    out << text;
}

std::string table_path(const std::string& out, const std::string& table) {
    const std::filesystem::path p(out);
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    return (p.parent_path() / (p.stem().string() + "_" + table + ext)).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian and 1D grid experiments for Wasserstein-Fisher-Rao operator splitting"};
    std::string experiment, config_path, out_path, suite;
    std::vector<std::string> overrides;
    bool json = false;
    int threads = 1;
    app.add_option("experiment", experiment, "figure1 | figure2 | figure3 | figure4 | ratio | grid-demo | validate")
        ->required();
    app.add_option("overrides", overrides, "key=value configuration overrides");
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out", out_path, "output path (one file per table when an experiment has several)");
    app.add_flag("--json", json, "emit JSON instead of CSV");
    app.add_option("--threads", threads, "worker threads for independent parameter points")
        ->check(CLI::Range(1, 256));
    app.add_option("--suite", suite, "validate: run a single suite");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        wfr::Config cfg = config_path.empty() ? wfr::Config{} : wfr::Config::load(config_path);
        for (const auto& o : overrides) cfg.set_override(o);

        if (experiment == "validate") {
            const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
            const auto unused = cfg.unused_keys();
            if (!unused.empty()) cfg.fail(unused.front(), "unknown field for validate");
            const auto checks = wfr::run_suites(suite, seed);
            const std::string text = json ? wfr::validate_json(checks, seed) : wfr::validate_text(checks, seed);
            if (out_path.empty())
                std::cout << text;
            else
                write_file(out_path, text);
            for (const auto& c : checks)
                if (!c.passed) return 1;
            return 0;
        }
        if (!suite.empty()) throw wfr::ConfigError("--suite only applies to validate");

        const wfr::ExperimentResult r = wfr::run_experiment(experiment, cfg, threads);
        if (json) {
            if (out_path.empty())
                std::cout << wfr::to_json(r);
            else
                write_file(out_path, wfr::to_json(r));
        } else if (out_path.empty()) {
            std::cout << wfr::to_csv(r);
        } else if (r.tables.size() == 1) {
            write_file(out_path, wfr::to_csv(r, r.tables.front()));
        } else {
            for (const auto& t : r.tables) write_file(table_path(out_path, t.name), wfr::to_csv(r, t));
        }
        for (const auto& n : r.notes) std::cerr << experiment << ": " << n << "\n";
        return 0;
    } catch (const wfr::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
