#include "autohybrid/one_class_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/learners.hpp"
#include "autohybrid/learners/smo.hpp"

namespace autohybrid {

namespace {
constexpr std::string_view kDeciderSchema = "autohybrid.ocsvm/1";
}

OneClassSvm::OneClassSvm(Standardizer standardizer, RowMatrix support, Vector alpha, double rho,
                         double sigma, double nu, Eigen::Index training_rows)
    : standardizer_(std::move(standardizer)), support_(std::move(support)),
      alpha_(std::move(alpha)), rho_(rho), sigma_(sigma), gamma_(1.0 / (2.0 * sigma * sigma)),
      nu_(nu), training_rows_(training_rows) {}

double OneClassSvm::score_standardized(const double* x) const noexcept {
    const auto d = static_cast<std::size_t>(support_.cols());
    const std::span<const double> xs(x, d);
    double f = 0.0;
    for (Eigen::Index k = 0; k < support_.rows(); ++k)
        f += alpha_(k) * learners::rbf(std::span<const double>(support_.row(k).data(), d), xs, gamma_);
    return f - rho_;
}

double OneClassSvm::decision_score(const Vector& x) const {
    if (x.size() != input_dim())
        throw DimensionMismatch(fmt::format("decider expects {} features, got {}", input_dim(),
                                            x.size()));
    const RowMatrix xs = standardizer_.apply(x.transpose());
    return score_standardized(xs.data());
}

Vector OneClassSvm::decision_scores(const Matrix& X) const {
    const RowMatrix xs = standardizer_.apply(X);
    Vector out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) = score_standardized(xs.row(r).data());
    return out;
}

double OneClassSvm::membership_from_score(double f) const noexcept {
    if (f_max_ > 0.0) return std::clamp(f / f_max_, 0.0, 1.0);
    return f >= 0.0 ? 1.0 : 0.0;
}

double OneClassSvm::membership(const Vector& x) const {
    return membership_from_score(decision_score(x));
}

Vector OneClassSvm::memberships(const Matrix& X) const {
    Vector f = decision_scores(X);
    for (Eigen::Index r = 0; r < f.size(); ++r) f(r) = membership_from_score(f(r));
    return f;
}

OneClassSvm fit_ocsvm(const Matrix& X, double sigma, double nu) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidSpec("1C-SVM sigma must be positive");
    if (!(nu > 0.0 && nu <= 1.0)) throw InvalidSpec("1C-SVM nu must lie in (0, 1]");
    if (X.rows() < 2) throw InvalidDataset("1C-SVM needs at least two rows");
    if (!X.allFinite()) throw InvalidDataset("1C-SVM input contains non-finite values");

    auto standardizer = Standardizer::fit(X);
    const RowMatrix rows = standardizer.apply(X);
    const learners::RbfKernel kernel(rows, sigma);
    const auto n = static_cast<std::size_t>(X.rows());
    // solved with 0 <= a_i <= 1, sum a_i = nu n so the tolerance has its usual scale
    const double nu_n = nu * static_cast<double>(n);
    const double upper = 1.0;

    learners::SmoProblem pr;
    pr.p.assign(n, 0.0);
    pr.y.assign(n, +1);
    pr.upper.assign(n, upper);
    pr.alpha.assign(n, 0.0);
    const auto full = std::min(n, static_cast<std::size_t>(nu_n));
    for (std::size_t i = 0; i < full; ++i) pr.alpha[i] = upper;
    if (full < n) pr.alpha[full] = nu_n - static_cast<double>(full);
    pr.kernel_index = [](std::size_t t) { return t; };
    pr.kernel_row = [&kernel](std::size_t t) { return kernel.row(static_cast<Eigen::Index>(t)); };

    const auto result = learners::solve_smo(std::move(pr), OneClassSvm::kTolerance,
                                            OneClassSvm::kMaxPassesPerRow * n * n);
    if (!result.converged)
        throw FitFailure("1C-SVM dual solver did not converge after " +
                         std::to_string(result.iterations) + " iterations");

    std::vector<Eigen::Index> support;
    for (std::size_t i = 0; i < n; ++i)
        if (result.alpha[i] > 0.0) support.push_back(static_cast<Eigen::Index>(i));
    RowMatrix sv(static_cast<Eigen::Index>(support.size()), X.cols());
    Vector alpha(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        sv.row(static_cast<Eigen::Index>(k)) = rows.row(support[k]);
        alpha(static_cast<Eigen::Index>(k)) = result.alpha[static_cast<std::size_t>(support[k])] / nu_n;
    }

    OneClassSvm model(std::move(standardizer), std::move(sv), std::move(alpha), result.rho / nu_n, sigma,
                      nu, X.rows());
    double f_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
        f_max = std::max(f_max, model.score_standardized(rows.row(r).data()));
    model.f_max_ = std::max(f_max, 0.0);
    return model;
}

nlohmann::json OneClassSvm::to_json() const {
    return {{"schema", kDeciderSchema},
            {"standardizer", standardizer_to_json(standardizer_)},
            {"dim", support_.cols()},
            {"support", std::vector<double>(support_.data(), support_.data() + support_.size())},
            {"alpha", std::vector<double>(alpha_.data(), alpha_.data() + alpha_.size())},
            {"rho", rho_},
            {"sigma", sigma_},
            {"nu", nu_},
            {"training_rows", training_rows_},
            {"f_max", f_max_}};
}

OneClassSvm OneClassSvm::from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kDeciderSchema)
            throw ParseError("unsupported decider schema");
        const auto dim = j.at("dim").get<Eigen::Index>();
        const auto sv = j.at("support").get<std::vector<double>>();
        const auto alpha = j.at("alpha").get<std::vector<double>>();
        const auto count = static_cast<Eigen::Index>(alpha.size());
        if (static_cast<Eigen::Index>(sv.size()) != count * dim)
            throw ParseError("decider blob has inconsistent shapes");
        OneClassSvm model(standardizer_from_json(j.at("standardizer")),
                          Eigen::Map<const RowMatrix>(sv.data(), count, dim),
                          Eigen::Map<const Vector>(alpha.data(), count), j.at("rho").get<double>(),
                          j.at("sigma").get<double>(), j.at("nu").get<double>(),
                          j.at("training_rows").get<Eigen::Index>());
        model.f_max_ = j.at("f_max").get<double>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed decider blob: ") + e.what());
    }
}

} // namespace autohybrid
