#include "autohybrid/dataset.hpp"

#include <cmath>

#include "autohybrid/error.hpp"

namespace autohybrid {

void Dataset::check(Eigen::Index min_rows) const {
    if (features.rows() != target.size())
        throw InvalidDataset("feature rows (" + std::to_string(features.rows()) +
                             ") differ from target length (" + std::to_string(target.size()) + ")");
    if (features.rows() < min_rows)
        throw InvalidDataset("dataset needs at least " + std::to_string(min_rows) + " rows");
    if (features.cols() < 1) throw InvalidDataset("dataset needs at least one feature");
    if (!features.allFinite() || !target.allFinite())
        throw InvalidDataset("dataset contains non-finite values");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != cols())
        throw InvalidDataset("feature name count differs from column count");
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
    return Dataset{select_rows(features, rows), select_rows(target, rows), feature_names, id};
}

Standardizer Standardizer::fit(const Matrix& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.mean_ = X.colwise().mean().transpose();
    s.scale_.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean_(j)).square().sum() / std::max(n, 1.0);
        const double sd = std::sqrt(var);
        s.scale_(j) = sd > 1e-12 * (1.0 + std::abs(s.mean_(j))) ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
    if (X.cols() != mean_.size())
        throw DimensionMismatch("expected " + std::to_string(mean_.size()) + " features, got " +
                                std::to_string(X.cols()));
    return ((X.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array())
        .matrix();
}

Matrix select_rows(const Matrix& X, std::span<const Eigen::Index> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    return out;
}

Vector select_rows(const Vector& v, std::span<const Eigen::Index> rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
    return out;
}

} // namespace autohybrid
