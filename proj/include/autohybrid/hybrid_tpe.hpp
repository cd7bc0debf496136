#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "autohybrid/dataset.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/hybrid_model.hpp"
#include "autohybrid/hybrid_space.hpp"
#include "autohybrid/tpe_optimizer.hpp"

namespace autohybrid {

struct HybridTpeOptions {
    TpeSettings settings;
    int threads = 1;  // parallel over CV folds inside one trial
    bool random_search = false;  // undirected baseline with the same budget
};

/// Mean validation MAE of one hybrid over the split's folds. Every fold fits the
/// interpolator, the extrapolator (once if identical) and the decider.
/// `fits` is incremented per fitted sub-model when given.
double hybrid_cv_score(const HybridChoice& choice, const Dataset& data, const SplitPlan& split,
                       int threads = 1, std::atomic<std::size_t>* fits = nullptr);

struct TpeReport {
    std::string interp_id;
    std::string extrap_id;
    std::string decider_id;
    Configuration chosen;
    std::size_t trials = 0;
    std::size_t failed_trials = 0;
    std::size_t fits_performed = 0;
    std::size_t refit_fallbacks = 0;
    bool stopped_early = false;
    double optimize_seconds = 0.0;
    double refit_seconds = 0.0;
    double total_seconds = 0.0;
    double best_cv_mae = 0.0;
    double test_mae = 0.0;

    nlohmann::json to_json() const;
};

struct TpeSearchResult {
    HybridModel model;
    TpeReport report;
    TpeResult tpe;
};

/// TPE over hybrid_tpe_space() on the tuning folds, then refits the incumbent on the
/// whole tuning partition and scores it on the hold-out test rows. An incumbent whose
/// refit raises FitFailure gives way to the next best trial.
/// Throws AllFitsFailed when no trial succeeded or none refits.
TpeSearchResult tpe_search_hybrid(const Dataset& data, const SplitPlan& split,
                                  const HybridTpeOptions& options);

} // namespace autohybrid
