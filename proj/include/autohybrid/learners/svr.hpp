#pragma once

#include "autohybrid/learners.hpp"

namespace autohybrid::learners {

/// epsilon-insensitive support vector regression with an RBF kernel.
class SvrRegressor final : public Regressor {
public:
    static constexpr double kTolerance = 1e-3;
    static constexpr std::size_t kMaxPassesPerRow = 10;

    SvrRegressor(RowMatrix support, Vector coefficients, double rho, double sigma)
        : support_(std::move(support)), coef_(std::move(coefficients)), rho_(rho), sigma_(sigma) {}

    /// Throws FitFailure when the dual solver does not converge.
    static SvrRegressor fit(const Matrix& X, const Vector& y, double sigma, double C,
                            double epsilon);

    Vector predict(const Matrix& X) const override;
    nlohmann::json to_json() const override;
    static SvrRegressor from_json(const nlohmann::json& j);

    Eigen::Index support_size() const noexcept { return support_.rows(); }

private:
    RowMatrix support_;
    Vector coef_;
    double rho_;
    double sigma_;
};

} // namespace autohybrid::learners
