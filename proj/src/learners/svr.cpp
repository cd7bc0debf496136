#include "autohybrid/learners/svr.hpp"

#include <cmath>

#include "autohybrid/error.hpp"
#include "autohybrid/learners/smo.hpp"

namespace autohybrid::learners {

SvrRegressor SvrRegressor::fit(const Matrix& X, const Vector& y, double sigma, double C,
                               double epsilon) {
    const RowMatrix rows = X;
    const RbfKernel kernel(rows, sigma);
    const auto n = static_cast<std::size_t>(X.rows());

    // Variables 0..n-1 are alpha, n..2n-1 are alpha*.
    SmoProblem pr;
    pr.p.resize(2 * n);
    pr.y.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        pr.p[i] = epsilon - y(static_cast<Eigen::Index>(i));
        pr.p[i + n] = epsilon + y(static_cast<Eigen::Index>(i));
        pr.y[i] = +1;
        pr.y[i + n] = -1;
    }
    pr.upper.assign(2 * n, C);
    pr.alpha.assign(2 * n, 0.0);
    pr.kernel_index = [n](std::size_t t) { return t % n; };
    pr.kernel_row = [&kernel, n](std::size_t t) {
        return kernel.row(static_cast<Eigen::Index>(t % n));
    };

    const auto result = solve_smo(std::move(pr), kTolerance, kMaxPassesPerRow * n * n);
    if (!result.converged)
        throw FitFailure("SVR dual solver did not converge after " +
                         std::to_string(result.iterations) + " iterations");

    std::vector<Eigen::Index> support;
    std::vector<double> coef;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = result.alpha[i] - result.alpha[i + n];
        if (c != 0.0) {
            support.push_back(static_cast<Eigen::Index>(i));
            coef.push_back(c);
        }
    }
    RowMatrix sv(static_cast<Eigen::Index>(support.size()), X.cols());
    for (std::size_t k = 0; k < support.size(); ++k)
        sv.row(static_cast<Eigen::Index>(k)) = rows.row(support[k]);
    return SvrRegressor(std::move(sv),
                        Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size())),
                        result.rho, sigma);
}

Vector SvrRegressor::predict(const Matrix& X) const {
    const double gamma = 1.0 / (2.0 * sigma_ * sigma_);
    const RowMatrix rows = X;
    const auto d = static_cast<std::size_t>(X.cols());
    Vector out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const std::span<const double> x(rows.row(r).data(), d);
        double f = 0.0;
        for (Eigen::Index k = 0; k < support_.rows(); ++k)
            f += coef_(k) * rbf(std::span<const double>(support_.row(k).data(), d), x, gamma);
        out(r) = f - rho_;
    }
    return out;
}

nlohmann::json SvrRegressor::to_json() const {
    std::vector<double> sv(support_.data(), support_.data() + support_.size());
    return {{"sigma", sigma_},
            {"rho", rho_},
            {"dim", support_.cols()},
            {"support", sv},
            {"coefficients", std::vector<double>(coef_.data(), coef_.data() + coef_.size())}};
}

SvrRegressor SvrRegressor::from_json(const nlohmann::json& j) {
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto sv = j.at("support").get<std::vector<double>>();
    const auto coef = j.at("coefficients").get<std::vector<double>>();
    const auto count = static_cast<Eigen::Index>(coef.size());
    if (static_cast<Eigen::Index>(sv.size()) != count * dim)
        throw ParseError("SVR blob has inconsistent shapes");
    return SvrRegressor(Eigen::Map<const RowMatrix>(sv.data(), count, dim),
                        Eigen::Map<const Vector>(coef.data(), count), j.at("rho").get<double>(),
                        j.at("sigma").get<double>());
}

} // namespace autohybrid::learners
