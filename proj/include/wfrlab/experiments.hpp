#pragma once

#include "wfrlab/config.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wfr {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a column by name; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
};

struct ExperimentResult {
    std::string experiment;
    std::string config_line;  ///< resolved configuration, "k=v; ..."
    std::uint64_t seed = 42;
    std::vector<std::string> notes;
    std::vector<Table> tables;
};

/// Runs f(i) for i in [0, n) on up to `threads` workers. Callers write into
/// slot i of a preallocated vector, so output order never depends on timing.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

std::vector<std::string> experiment_names();

/// Dispatch by name. Throws ConfigError for an unknown experiment or bad fields.
ExperimentResult run_experiment(const std::string& name, const Config& cfg, int threads);

ExperimentResult run_figure1(const Config& cfg, int threads);
ExperimentResult run_figure2(const Config& cfg, int threads);
ExperimentResult run_figure3(const Config& cfg, int threads);
ExperimentResult run_figure4(const Config& cfg, int threads);
ExperimentResult run_ratio(const Config& cfg, int threads);
ExperimentResult run_grid_demo(const Config& cfg, int threads);

/// CSV text for one table, with the `#` metadata header.
std::string to_csv(const ExperimentResult& r, const Table& t);
/// All tables in one stream, separated by `# table:` lines.
std::string to_csv(const ExperimentResult& r);
std::string to_json(const ExperimentResult& r);

}  // namespace wfr
