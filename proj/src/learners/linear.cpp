#include "autohybrid/learners/linear.hpp"

#include "autohybrid/error.hpp"

namespace autohybrid::learners {

LinearRegressor LinearRegressor::fit(const Matrix& X, const Vector& y) {
    Matrix design(X.rows(), X.cols() + 1);
    design.leftCols(X.cols()) = X;
    design.col(X.cols()).setOnes();
    const Vector beta = design.colPivHouseholderQr().solve(y);
    if (!beta.allFinite()) throw FitFailure("least-squares solution is not finite");
    return LinearRegressor(beta.head(X.cols()), beta(X.cols()));
}

Vector LinearRegressor::predict(const Matrix& X) const {
    return (X * weights_).array() + intercept_;
}

nlohmann::json LinearRegressor::to_json() const {
    return {{"weights", std::vector<double>(weights_.data(), weights_.data() + weights_.size())},
            {"intercept", intercept_}};
}

LinearRegressor LinearRegressor::from_json(const nlohmann::json& j) {
    const auto w = j.at("weights").get<std::vector<double>>();
    return LinearRegressor(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())),
                           j.at("intercept").get<double>());
}

} // namespace autohybrid::learners
