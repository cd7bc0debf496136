#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace autohybrid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Tabular regression data. Invariants (checked by `check()`): finite values,
/// at least 10 rows, at least one feature, matching row counts.
struct Dataset {
    Matrix features;
    Vector target;
    std::vector<std::string> feature_names;
    std::string id;

    Eigen::Index rows() const noexcept { return features.rows(); }
    Eigen::Index cols() const noexcept { return features.cols(); }

    /// Throws InvalidDataset describing the first broken invariant.
    void check(Eigen::Index min_rows = 10) const;

    /// Rows selected by index, keeping names and id.
    Dataset subset(std::span<const Eigen::Index> rows) const;
};

/// Per-feature z-scoring with statistics captured from training data only.
/// Constant features get a unit scale so they map to zero.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(Vector mean, Vector scale) : mean_(std::move(mean)), scale_(std::move(scale)) {}
    static Standardizer fit(const Matrix& X);

    Matrix apply(const Matrix& X) const;
    Eigen::Index dimension() const noexcept { return mean_.size(); }
    const Vector& mean() const noexcept { return mean_; }
    const Vector& scale() const noexcept { return scale_; }

private:
    Vector mean_;
    Vector scale_;
};

/// Rows of X picked by index.
Matrix select_rows(const Matrix& X, std::span<const Eigen::Index> rows);
Vector select_rows(const Vector& v, std::span<const Eigen::Index> rows);

} // namespace autohybrid
