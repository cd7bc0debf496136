#include "autohybrid/grid_search.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/log.hpp"
#include "autohybrid/parallel.hpp"

namespace autohybrid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct FoldData {
    Dataset train;
    Matrix validation;
};

} // namespace

std::vector<Vector> fold_truth(const SplitPlan& split, const Dataset& data) {
    std::vector<Vector> truth;
    for (int k = 0; k < split.folds; ++k)
        truth.push_back(select_rows(data.target, split.fold(k).validation));
    return truth;
}

PredictionCache fit_submodel_pool(const std::vector<LearnerSpec>& predictors,
                                  const std::vector<DeciderSpec>& deciders,
                                  const SplitPlan& split, const Dataset& data,
                                  const PoolOptions& options) {
    if (predictors.empty() || deciders.empty())
        throw InvalidConfig("the sub-model pool needs at least one predictor and one decider");
    data.check();

    std::vector<FoldData> folds;
    for (int k = 0; k < split.folds; ++k) {
        const auto f = split.fold(k);
        folds.push_back({data.subset(f.train), select_rows(data.features, f.validation)});
    }

    PredictionCache cache;
    cache.folds = split.folds;
    for (const auto& p : predictors) cache.predictor_ids.push_back(p.label());
    for (const auto& d : deciders) cache.decider_ids.push_back(d.label());
    const auto np = predictors.size();
    const auto nd = deciders.size();
    const auto nf = static_cast<std::size_t>(split.folds);
    cache.predictions.assign(nf, std::vector<CacheEntry>(np));
    cache.memberships.assign(nf, std::vector<CacheEntry>(nd));

    // One task per (fold, sub-model); every task owns exactly one cache slot.
    const std::size_t per_fold = np + nd;
    parallel_for(nf * per_fold, options.threads, [&](std::size_t task) {
        const auto k = task / per_fold;
        const auto m = task % per_fold;
        const auto& fold = folds[k];
        const auto start = Clock::now();
        CacheEntry entry;
        try {
            if (m < np) {
                entry.values = fit(predictors[m], fold.train).predict(fold.validation);
            } else {
                const auto& d = deciders[m - np];
                entry.values = fit_ocsvm(fold.train.features, d.sigma, d.nu).memberships(fold.validation);
            }
            if (!entry.values->allFinite()) {
                entry.values.reset();
                entry.error = "non-finite output";
            }
        } catch (const Error& e) {
            entry.values.reset();
            entry.error = e.what();
        }
        entry.seconds = seconds_since(start);
        if (!entry.ok())
            log_warning(fmt::format("fold {}: {} failed: {}", k,
                                    m < np ? cache.predictor_ids[m] : cache.decider_ids[m - np],
                                    entry.error));
        (m < np ? cache.predictions[k][m] : cache.memberships[k][m - np]) = std::move(entry);
    });
    cache.fits_performed = nf * per_fold;

    for (std::size_t k = 0; k < nf; ++k) {
        const bool any_pred = std::any_of(cache.predictions[k].begin(), cache.predictions[k].end(),
                                          [](const CacheEntry& e) { return e.ok(); });
        const bool any_dec = std::any_of(cache.memberships[k].begin(), cache.memberships[k].end(),
                                         [](const CacheEntry& e) { return e.ok(); });
        if (!any_pred || !any_dec)
            throw AllFitsFailed(fmt::format("fold {} has no usable {}", k,
                                            any_pred ? "decider" : "predictor"));
    }
    return cache;
}

std::vector<RankedTriple> combine_cached(PredictionCache& cache,
                                         const std::vector<Vector>& truth_per_fold, int threads) {
    const auto nf = static_cast<std::size_t>(cache.folds);
    const auto np = cache.predictor_count();
    const auto nd = cache.decider_count();
    if (truth_per_fold.size() != nf)
        throw LengthMismatch(fmt::format("{} truth vectors for {} folds", truth_per_fold.size(), nf));
    for (std::size_t k = 0; k < nf; ++k) {
        const auto len = truth_per_fold[k].size();
        for (const auto& e : cache.predictions[k])
            if (e.ok() && e.values->size() != len)
                throw LengthMismatch(fmt::format("fold {}: prediction length differs from truth", k));
        for (const auto& e : cache.memberships[k])
            if (e.ok() && e.values->size() != len)
                throw LengthMismatch(fmt::format("fold {}: membership length differs from truth", k));
    }

    auto usable = [&](const std::vector<std::vector<CacheEntry>>& entries, std::size_t m) {
        for (std::size_t k = 0; k < nf; ++k)
            if (!entries[k][m].ok()) return false;
        return true;
    };
    std::vector<char> pred_ok(np);
    std::vector<char> dec_ok(nd);
    for (std::size_t m = 0; m < np; ++m) pred_ok[m] = usable(cache.predictions, m);
    for (std::size_t m = 0; m < nd; ++m) dec_ok[m] = usable(cache.memberships, m);

    constexpr double kUnusable = std::numeric_limits<double>::infinity();
    std::vector<double> scores(np * np * nd, kUnusable);

    // Each decider writes its own slots of `scores`.
    parallel_for(nd, threads, [&](std::size_t d) {
        if (!dec_ok[d]) return;
        std::vector<double> fold_mae(nf);
        for (std::size_t i = 0; i < np; ++i) {
            if (!pred_ok[i]) continue;
            for (std::size_t e = 0; e < np; ++e) {
                if (!pred_ok[e]) continue;
                for (std::size_t k = 0; k < nf; ++k) {
                    const Vector& mu = *cache.memberships[k][d].values;
                    const Vector& pi = *cache.predictions[k][i].values;
                    const Vector& pe = *cache.predictions[k][e].values;
                    const Vector& y = truth_per_fold[k];
                    double sum = 0.0;
                    for (Eigen::Index r = 0; r < y.size(); ++r)
                        sum += std::abs(blend(mu(r), pi(r), pe(r)) - y(r));
                    fold_mae[k] = sum / static_cast<double>(y.size());
                }
                scores[(i * np + e) * nd + d] = mean_cv_score(fold_mae);
            }
        }
    });

    std::vector<RankedTriple> ranking;
    for (std::size_t idx = 0; idx < scores.size(); ++idx) {
        if (scores[idx] == kUnusable) continue;
        RankedTriple t;
        t.decider = idx % nd;
        t.extrap = (idx / nd) % np;
        t.interp = idx / (nd * np);
        t.mean_mae = scores[idx];
        t.enumeration_index = idx;
        ranking.push_back(t);
    }
    cache.combinations_evaluated = ranking.size();
    if (ranking.empty()) throw EmptyRanking("no triple is usable in every fold");
    std::stable_sort(ranking.begin(), ranking.end(), [](const RankedTriple& a, const RankedTriple& b) {
        return a.mean_mae < b.mean_mae;
    });
    return ranking;
}

nlohmann::json GridReport::to_json() const {
    auto head = nlohmann::json::array();
    for (const auto& t : ranking_head)
        head.push_back({{"interp", predictor_ids[t.interp]},
                        {"extrap", predictor_ids[t.extrap]},
                        {"decider", decider_ids[t.decider]},
                        {"mean_mae", t.mean_mae}});
    return {{"chosen", {{"interp", interp_id}, {"extrap", extrap_id}, {"decider", decider_id}}},
            {"chosen_config", autohybrid::to_json(chosen)},
            {"ranking_head", head},
            {"counters",
             {{"fits_performed", fits_performed},
              {"combinations_evaluated", combinations_evaluated},
              {"failed_fits", failed_fits},
              {"refit_fallbacks", refit_fallbacks}}},
            {"timings_s",
             {{"pool", pool_seconds},
              {"combine", combine_seconds},
              {"refit", refit_seconds},
              {"total", total_seconds}}},
            {"best_cv_mae", best_cv_mae},
            {"test_mae", test_mae}};
}

GridSearchResult grid_search_hybrid(const Dataset& data, const HybridGrid& grid,
                                    const SplitPlan& split, const PoolOptions& options) {
    if (split.test.empty()) throw TooFewRows("the split reserves no hold-out test rows");
    const auto start = Clock::now();

    auto cache = fit_submodel_pool(grid.predictors, grid.deciders, split, data, options);
    GridReport report;
    report.pool_seconds = seconds_since(start);

    const auto combine_start = Clock::now();
    const auto ranking = combine_cached(cache, fold_truth(split, data), options.threads);
    report.combine_seconds = seconds_since(combine_start);

    report.predictor_ids = cache.predictor_ids;
    report.decider_ids = cache.decider_ids;
    report.fits_performed = cache.fits_performed;
    report.combinations_evaluated = cache.combinations_evaluated;
    for (int k = 0; k < cache.folds; ++k) {
        const auto fk = static_cast<std::size_t>(k);
        for (const auto& e : cache.predictions[fk]) report.failed_fits += e.ok() ? 0 : 1;
        for (const auto& e : cache.memberships[fk]) report.failed_fits += e.ok() ? 0 : 1;
    }
    report.ranking_head.assign(ranking.begin(),
                               ranking.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(20, ranking.size())));

    const auto np = cache.predictor_count();
    const auto nd = cache.decider_count();
    std::vector<double> by_enumeration(np * np * nd, std::numeric_limits<double>::infinity());
    for (const auto& t : ranking) by_enumeration[t.enumeration_index] = t.mean_mae;
    report.trace = best_so_far(by_enumeration);

    const auto refit_start = Clock::now();
    const auto tuning = data.subset(split.tuning);
    std::optional<HybridModel> model;
    for (const auto& best : ranking) {
        const auto& interp_spec = grid.predictors[best.interp];
        const auto& extrap_spec = grid.predictors[best.extrap];
        const auto& decider_spec = grid.deciders[best.decider];
        report.interp_id = cache.predictor_ids[best.interp];
        report.extrap_id = cache.predictor_ids[best.extrap];
        report.decider_id = cache.decider_ids[best.decider];
        report.chosen = hybrid_config(interp_spec, extrap_spec, decider_spec);
        report.best_cv_mae = best.mean_mae;
        try {
            model = assemble(fit(interp_spec, tuning), fit(extrap_spec, tuning),
                             fit_ocsvm(tuning.features, decider_spec.sigma, decider_spec.nu), report.chosen);
            break;
        } catch (const FitFailure& e) {
            log_warning(fmt::format("refit of {} / {} / {} failed: {}", report.interp_id, report.extrap_id,
                                    report.decider_id, e.what()));
            ++report.refit_fallbacks;
        }
    }
    if (!model) throw AllFitsFailed("no ranked triple could be refitted on the tuning rows");
    report.refit_seconds = seconds_since(refit_start);

    const auto test = data.subset(split.test);
    report.test_mae = mae(model->predict(test.features), test.target);
    report.total_seconds = seconds_since(start);
    return GridSearchResult{std::move(*model), std::move(report)};
}

} // namespace autohybrid
