#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "autohybrid/hybrid_space.hpp"
#include "autohybrid/tpe_optimizer.hpp"

namespace autohybrid {

struct DatasetRef {
    std::filesystem::path path;
    std::string target;
};

/// One benchmark: every (dataset, seed, method) cell is designed and scored once.
struct ExperimentConfig {
    std::vector<DatasetRef> datasets;
    std::vector<std::string> methods;   // "grid", "tpe"
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    TpeSettings tpe;
    /// "default", "micro", or {"predictor_space": <space>, "decider_sigmas": [...]}.
    nlohmann::json grid = "default";
    std::filesystem::path output_dir = "results";

    /// Throws InvalidConfig.
    void check() const;
    /// Relative dataset paths are resolved against `base_dir`. Throws InvalidConfig, ParseError.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    nlohmann::json to_json() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Predictors and deciders named by an ExperimentConfig grid entry.
HybridGrid experiment_grid(const nlohmann::json& grid, std::uint64_t seed);
/// Two MLP sizes, two SVR widths and LR; two decider widths.
HybridGrid micro_hybrid_grid(std::uint64_t seed);

struct CellResult {
    std::string dataset;
    std::uint64_t seed = 0;
    std::string method;
    double test_mae = 0.0;
    std::size_t fits = 0;
    std::size_t combinations_or_trials = 0;
    double wall_time_s = 0.0;
    std::vector<double> trace;   // best-so-far validation score
};

struct BenchmarkOutcome {
    std::vector<CellResult> cells;      // successful cells in (dataset, seed, method) order
    std::vector<std::string> errors;
    int exit_code = 0;                  // 0 all cells ok, 2 some failed
};

/// Runs every cell on up to `jobs` workers and writes results.csv, traces.csv,
/// convergence.csv, summary.csv and, on failures, errors.log into cfg.output_dir.
BenchmarkOutcome run_benchmark(const ExperimentConfig& cfg, int jobs = 1);

/// convergence.csv: dataset, method, trial_index, mean_best_so_far, ci_half_width,
/// aggregated over seeds; shorter traces are padded with their final value.
/// summary.csv: one row per dataset and method.
void emit_report(const std::vector<CellResult>& cells, const std::filesystem::path& out_dir);

/// Reads results.csv and traces.csv back from a benchmark directory.
std::vector<CellResult> load_results(const std::filesystem::path& out_dir);

} // namespace autohybrid
