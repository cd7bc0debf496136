#include "autohybrid/hybrid_tpe.hpp"

#include <algorithm>
#include <chrono>
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

} // namespace

double hybrid_cv_score(const HybridChoice& choice, const Dataset& data, const SplitPlan& split,
                       int threads, std::atomic<std::size_t>* fits) {
    const bool shared = choice.interpolation == choice.extrapolation;
    std::vector<double> fold_mae(static_cast<std::size_t>(split.folds));
    parallel_for(fold_mae.size(), threads, [&](std::size_t k) {
        const auto f = split.fold(static_cast<int>(k));
        const auto train = data.subset(f.train);
        const auto valid = data.subset(f.validation);
        const auto interp = fit(choice.interpolation, train);
        const auto extrap = shared ? interp : fit(choice.extrapolation, train);
        const auto decider = fit_ocsvm(train.features, choice.decider.sigma, choice.decider.nu);
        if (fits) *fits += shared ? 2 : 3;
        const auto mu = decider.memberships(valid.features);
        const auto pi = interp.predict(valid.features);
        const auto pe = extrap.predict(valid.features);
        Vector blended(mu.size());
        for (Eigen::Index r = 0; r < mu.size(); ++r) blended(r) = blend(mu(r), pi(r), pe(r));
        fold_mae[k] = mae(blended, valid.target);
    });
    return mean_cv_score(fold_mae);
}

nlohmann::json TpeReport::to_json() const {
    return {{"chosen", {{"interp", interp_id}, {"extrap", extrap_id}, {"decider", decider_id}}},
            {"chosen_config", autohybrid::to_json(chosen)},
            {"counters",
             {{"trials", trials},
              {"failed_trials", failed_trials},
              {"fits_performed", fits_performed},
              {"refit_fallbacks", refit_fallbacks},
              {"stopped_early", stopped_early}}},
            {"timings_s",
             {{"optimize", optimize_seconds}, {"refit", refit_seconds}, {"total", total_seconds}}},
            {"best_cv_mae", best_cv_mae},
            {"test_mae", test_mae}};
}

TpeSearchResult tpe_search_hybrid(const Dataset& data, const SplitPlan& split,
                                  const HybridTpeOptions& options) {
    if (split.test.empty()) throw TooFewRows("the split reserves no hold-out test rows");
    data.check();
    const auto start = Clock::now();
    const auto space = hybrid_tpe_space();
    const auto seed = options.settings.seed;
    std::atomic<std::size_t> fits{0};

    const Objective objective = [&](const Configuration& cfg) {
        return hybrid_cv_score(hybrid_choice_from_config(cfg, seed), data, split, options.threads, &fits);
    };
    auto result = options.random_search ? run_random_search(objective, space, options.settings)
                                        : run_tpe(objective, space, options.settings);

    TpeReport report;
    report.optimize_seconds = seconds_since(start);
    report.trials = result.history.size();
    for (const auto& t : result.history) report.failed_trials += t.ok() ? 0 : 1;
    report.stopped_early = result.stopped_early;
    std::vector<const Trial*> ranked;
    for (const auto& t : result.history)
        if (t.ok()) ranked.push_back(&t);
    if (ranked.empty()) throw AllFitsFailed("every TPE trial failed");
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Trial* a, const Trial* b) { return a->score < b->score; });

    const auto refit_start = Clock::now();
    const auto tuning = data.subset(split.tuning);
    std::optional<HybridModel> model;
    for (const Trial* best : ranked) {
        const auto choice = hybrid_choice_from_config(best->config, seed);
        report.chosen = best->config;
        report.best_cv_mae = best->score;
        report.interp_id = choice.interpolation.label();
        report.extrap_id = choice.extrapolation.label();
        report.decider_id = choice.decider.label();
        try {
            model = assemble(fit(choice.interpolation, tuning), fit(choice.extrapolation, tuning),
                             fit_ocsvm(tuning.features, choice.decider.sigma, choice.decider.nu), best->config);
            break;
        } catch (const FitFailure& e) {
            log_warning(fmt::format("refit of {} / {} / {} failed: {}", report.interp_id, report.extrap_id,
                                    report.decider_id, e.what()));
            ++report.refit_fallbacks;
        }
    }
    if (!model) throw AllFitsFailed("no successful trial could be refitted on the tuning rows");
    report.refit_seconds = seconds_since(refit_start);
    report.fits_performed = fits.load();

    const auto test = data.subset(split.test);
    report.test_mae = mae(model->predict(test.features), test.target);
    report.total_seconds = seconds_since(start);
    return TpeSearchResult{std::move(*model), std::move(report), std::move(result)};
}

} // namespace autohybrid
