#pragma once

#include <algorithm>
#include <vector>

#include "autohybrid/evaluation.hpp"
#include "autohybrid/grid_search.hpp"
#include "autohybrid/hybrid_model.hpp"

namespace autohybrid::oracle {

/// Brute force: every triple refits its three members on every fold and is scored
/// through the assembled hybrid, with no cache.
inline std::vector<RankedTriple> naive_ranking(const HybridGrid& grid, const SplitPlan& split,
                                               const Dataset& data) {
    const auto np = grid.predictors.size(), nd = grid.deciders.size();
    std::vector<RankedTriple> out;
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t e = 0; e < np; ++e)
            for (std::size_t d = 0; d < nd; ++d) {
                std::vector<double> per_fold;
                for (int k = 0; k < split.folds; ++k) {
                    const auto f = split.fold(k);
                    const auto train = data.subset(f.train);
                    const auto valid = data.subset(f.validation);
                    const auto h = assemble(
                        fit(grid.predictors[i], train), fit(grid.predictors[e], train),
                        fit_ocsvm(train.features, grid.deciders[d].sigma, grid.deciders[d].nu));
                    per_fold.push_back(mae(h.predict(valid.features), valid.target));
                }
                out.push_back(RankedTriple{i, e, d, mean_cv_score(per_fold), out.size()});
            }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedTriple& a, const RankedTriple& b) { return a.mean_mae < b.mean_mae; });
    return out;
}

} // namespace autohybrid::oracle
