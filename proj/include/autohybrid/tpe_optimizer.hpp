#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "autohybrid/config_space.hpp"

namespace autohybrid {

enum class TrialStatus { ok, failed };

struct Trial {
    Configuration config;
    double score = std::numeric_limits<double>::infinity();   // Q, lower is better
    TrialStatus status = TrialStatus::failed;
    double duration_s = 0.0;

    bool ok() const noexcept { return status == TrialStatus::ok; }
};

struct EarlyStopping {
    int patience = 50;
    double min_rel_improvement = 1e-3;
};

struct TpeSettings {
    double gamma = 0.25;
    int n_startup = 20;
    int n_candidates = 24;
    int n_trials = 500;
    std::uint64_t seed = 0;
    std::optional<EarlyStopping> early_stop;

    /// Throws InvalidConfig.
    void check() const;
};

using TrialHistory = std::vector<Trial>;

/// Size of the good set for `n` observed trials: ceil(gamma * n).
std::size_t good_set_size(std::size_t n, double gamma);

/// Next configuration to evaluate. Random while the history is shorter than
/// n_startup, otherwise the candidate drawn from l maximizing l/g.
/// Deterministic per (settings.seed, history).
Configuration suggest_next(const ConfigurationSpace& space, const TrialHistory& history,
                           const TpeSettings& settings);

/// A copy of `history` with `trial` appended. Failed trials are stored with Q = +inf.
/// Throws InvalidConfig when the trial's configuration is not a point of `space`.
TrialHistory observe(const ConfigurationSpace& space, const TrialHistory& history, Trial trial);

/// Maps a configuration to Q; throwing or returning a non-finite value marks the trial failed.
using Objective = std::function<double(const Configuration&)>;

struct TpeResult {
    TrialHistory history;
    std::vector<double> trace;              // best-so-far Q per trial
    std::optional<std::size_t> best_index;  // empty when every trial failed
    bool stopped_early = false;

    const Trial* best() const { return best_index ? &history[*best_index] : nullptr; }
};

TpeResult run_tpe(const Objective& objective, const ConfigurationSpace& space,
                  const TpeSettings& settings);

/// Same loop with every suggestion drawn by sample_random; the undirected baseline.
TpeResult run_random_search(const Objective& objective, const ConfigurationSpace& space,
                            const TpeSettings& settings);

/// Columns: trial_index, Q, best_so_far, duration_s, config_json.
void write_trace_csv(std::ostream& out, const TpeResult& result);

} // namespace autohybrid
