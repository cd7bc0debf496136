#pragma once

#include <cstdint>
#include <vector>

#include "autohybrid/learners.hpp"
#include "autohybrid/learners/tree.hpp"

namespace autohybrid::learners {

/// Bagged unbounded-depth CART trees, ceil(d/3) candidate features per split.
class RandomForestRegressor final : public Regressor {
public:
    explicit RandomForestRegressor(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}

    static RandomForestRegressor fit(const Matrix& X, const Vector& y, int estimators,
                                     std::uint64_t seed);

    Vector predict(const Matrix& X) const override;
    nlohmann::json to_json() const override;
    static RandomForestRegressor from_json(const nlohmann::json& j);

    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

private:
    std::vector<RegressionTree> trees_;
};

/// Squared-loss boosting of depth-3 trees with shrinkage 0.1.
class GradientBoostingRegressor final : public Regressor {
public:
    static constexpr int kDepth = 3;
    static constexpr double kShrinkage = 0.1;

    GradientBoostingRegressor(double base, std::vector<RegressionTree> trees)
        : base_(base), trees_(std::move(trees)) {}

    static GradientBoostingRegressor fit(const Matrix& X, const Vector& y, int estimators,
                                         std::uint64_t seed);

    Vector predict(const Matrix& X) const override;
    nlohmann::json to_json() const override;
    static GradientBoostingRegressor from_json(const nlohmann::json& j);

    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

private:
    double base_;
    std::vector<RegressionTree> trees_;
};

} // namespace autohybrid::learners
