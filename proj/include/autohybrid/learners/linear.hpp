#pragma once

#include "autohybrid/learners.hpp"

namespace autohybrid::learners {

/// Ordinary least squares with intercept, solved by column-pivoting QR.
class LinearRegressor final : public Regressor {
public:
    LinearRegressor(Vector weights, double intercept)
        : weights_(std::move(weights)), intercept_(intercept) {}

    static LinearRegressor fit(const Matrix& X, const Vector& y);

    Vector predict(const Matrix& X) const override;
    nlohmann::json to_json() const override;
    static LinearRegressor from_json(const nlohmann::json& j);

    const Vector& weights() const noexcept { return weights_; }
    double intercept() const noexcept { return intercept_; }

private:
    Vector weights_;
    double intercept_;
};

} // namespace autohybrid::learners
