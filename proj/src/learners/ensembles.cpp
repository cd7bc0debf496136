#include "autohybrid/learners/ensembles.hpp"

#include <cmath>

#include "autohybrid/error.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid::learners {

namespace {

nlohmann::json trees_json(const std::vector<RegressionTree>& trees) {
    auto arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return arr;
}

std::vector<RegressionTree> trees_from_json(const nlohmann::json& j) {
    std::vector<RegressionTree> trees;
    for (const auto& t : j) trees.push_back(RegressionTree::from_json(t));
    return trees;
}

} // namespace

RandomForestRegressor RandomForestRegressor::fit(const Matrix& X, const Vector& y, int estimators,
                                                 std::uint64_t seed) {
    const SortedColumns sorted(X);
    const auto n = static_cast<std::size_t>(X.rows());
    const int d = static_cast<int>(X.cols());
    TreeOptions options;
    options.max_depth = -1;
    options.features_per_split = (d + 2) / 3;
    options.min_leaf_weight = 1.0;

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<double> counts(n);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(estimators));
    for (int t = 0; t < estimators; ++t) {
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) counts[draw(rng)] += 1.0;
        trees.push_back(grow_tree(X, sorted, y, counts, options, rng));
    }
    return RandomForestRegressor(std::move(trees));
}

Vector RandomForestRegressor::predict(const Matrix& X) const {
    Vector out = Vector::Zero(X.rows());
    for (const auto& tree : trees_)
        for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) += tree.predict_row(X, r);
    if (!trees_.empty()) out /= static_cast<double>(trees_.size());
    return out;
}

nlohmann::json RandomForestRegressor::to_json() const {
    return {{"trees", trees_json(trees_)}};
}

RandomForestRegressor RandomForestRegressor::from_json(const nlohmann::json& j) {
    return RandomForestRegressor(trees_from_json(j.at("trees")));
}

GradientBoostingRegressor GradientBoostingRegressor::fit(const Matrix& X, const Vector& y,
                                                         int estimators, std::uint64_t seed) {
    const SortedColumns sorted(X);
    const auto n = static_cast<std::size_t>(X.rows());
    TreeOptions options;
    options.max_depth = kDepth;
    options.features_per_split = 0;
    options.min_leaf_weight = 1.0;

    // All features are candidates, so the generator is only consumed for bookkeeping.
    Rng rng(seed);
    const std::vector<double> ones(n, 1.0);
    const double base = y.mean();
    Vector fitted = Vector::Constant(X.rows(), base);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(estimators));
    for (int t = 0; t < estimators; ++t) {
        const Vector residual = y - fitted;
        auto tree = grow_tree(X, sorted, residual, ones, options, rng);
        for (Eigen::Index r = 0; r < X.rows(); ++r) fitted(r) += kShrinkage * tree.predict_row(X, r);
        trees.push_back(std::move(tree));
    }
    if (!fitted.allFinite()) throw FitFailure("gradient boosting produced non-finite values");
    return GradientBoostingRegressor(base, std::move(trees));
}

Vector GradientBoostingRegressor::predict(const Matrix& X) const {
    Vector out = Vector::Constant(X.rows(), base_);
    for (const auto& tree : trees_)
        for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) += kShrinkage * tree.predict_row(X, r);
    return out;
}

nlohmann::json GradientBoostingRegressor::to_json() const {
    return {{"base", base_}, {"trees", trees_json(trees_)}};
}

GradientBoostingRegressor GradientBoostingRegressor::from_json(const nlohmann::json& j) {
    return GradientBoostingRegressor(j.at("base").get<double>(), trees_from_json(j.at("trees")));
}

} // namespace autohybrid::learners
