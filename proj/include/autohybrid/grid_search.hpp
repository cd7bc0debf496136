#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autohybrid/dataset.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/hybrid_model.hpp"
#include "autohybrid/hybrid_space.hpp"

namespace autohybrid {

/// One cached validation output. A failed fit carries no vector.
struct CacheEntry {
    std::optional<Vector> values;
    double seconds = 0.0;
    std::string error;

    bool ok() const noexcept { return values.has_value(); }
};

/// Fold-wise validation outputs of every sub-model: predictions of each predictor and
/// memberships of each decider, fitted once per fold.
struct PredictionCache {
    int folds = 0;
    std::vector<std::string> predictor_ids;
    std::vector<std::string> decider_ids;
    std::vector<std::vector<CacheEntry>> predictions;  // [fold][predictor]
    std::vector<std::vector<CacheEntry>> memberships;  // [fold][decider]
    std::size_t fits_performed = 0;
    std::size_t combinations_evaluated = 0;

    std::size_t predictor_count() const noexcept { return predictor_ids.size(); }
    std::size_t decider_count() const noexcept { return decider_ids.size(); }
};

struct PoolOptions {
    int threads = 1;  // parallel over (sub-model, fold) pairs
};

/// Fits every predictor and decider on each fold's training rows and caches their
/// outputs on the fold's validation rows. Failures are recorded, not fatal.
/// Throws AllFitsFailed if a fold has no usable predictor or no usable decider.
PredictionCache fit_submodel_pool(const std::vector<LearnerSpec>& predictors,
                                  const std::vector<DeciderSpec>& deciders,
                                  const SplitPlan& split, const Dataset& data,
                                  const PoolOptions& options = {});

/// Validation targets of each fold, in the cache's row order.
std::vector<Vector> fold_truth(const SplitPlan& split, const Dataset& data);

struct RankedTriple {
    std::size_t interp = 0;
    std::size_t extrap = 0;
    std::size_t decider = 0;
    double mean_mae = 0.0;
    /// Position in (interp, extrap, decider) lexicographic enumeration.
    std::size_t enumeration_index = 0;
};

/// Scores every triple whose entries are usable in every fold from the cached vectors
/// and returns them by ascending mean validation MAE, ties by enumeration order.
/// Sets cache.combinations_evaluated. Throws LengthMismatch, EmptyRanking.
std::vector<RankedTriple> combine_cached(PredictionCache& cache,
                                         const std::vector<Vector>& truth_per_fold,
                                         int threads = 1);

struct GridReport {
    std::string interp_id;
    std::string extrap_id;
    std::string decider_id;
    Configuration chosen;
    std::vector<RankedTriple> ranking_head;  // top 20
    std::vector<std::string> predictor_ids;
    std::vector<std::string> decider_ids;
    std::size_t fits_performed = 0;
    std::size_t combinations_evaluated = 0;
    std::size_t failed_fits = 0;
    std::size_t refit_fallbacks = 0;  // ranked triples skipped because their refit failed
    double pool_seconds = 0.0;
    double combine_seconds = 0.0;
    double refit_seconds = 0.0;
    double total_seconds = 0.0;
    double best_cv_mae = 0.0;
    double test_mae = 0.0;
    /// Best-so-far mean validation MAE over triples in enumeration order.
    std::vector<double> trace;

    nlohmann::json to_json() const;
};

struct GridSearchResult {
    HybridModel model;
    GridReport report;
};

/// Pool + cached combination on the tuning folds, then refits the best triple on the
/// whole tuning partition and scores it on the hold-out test rows. A triple whose refit
/// raises FitFailure is skipped for the next in rank.
GridSearchResult grid_search_hybrid(const Dataset& data, const HybridGrid& grid,
                                    const SplitPlan& split, const PoolOptions& options = {});

} // namespace autohybrid
