#pragma once

#include <json.hpp>

#include "autohybrid/dataset.hpp"

namespace autohybrid {

/// nu one-class SVM with RBF kernel, fitted on z-scored inputs. The dual is kept in
/// the normalized form 0 <= alpha_i <= 1/(nu n), sum alpha_i = 1, and the decision
/// score is f(x) = sum alpha_i k(x_i, x) - rho.
class OneClassSvm {
public:
    static constexpr double kTolerance = 1e-3;
    static constexpr std::size_t kMaxPassesPerRow = 10;

    OneClassSvm(Standardizer standardizer, RowMatrix support, Vector alpha, double rho,
                double sigma, double nu, Eigen::Index training_rows);

    Eigen::Index input_dim() const noexcept { return standardizer_.dimension(); }
    const Standardizer& standardizer() const noexcept { return standardizer_; }
    /// Support vectors in standardized coordinates.
    const RowMatrix& support_vectors() const noexcept { return support_; }
    const Vector& dual_coefficients() const noexcept { return alpha_; }
    double rho() const noexcept { return rho_; }
    double sigma() const noexcept { return sigma_; }
    double nu() const noexcept { return nu_; }
    double f_max() const noexcept { return f_max_; }
    Eigen::Index training_rows() const noexcept { return training_rows_; }

    /// Throws DimensionMismatch.
    double decision_score(const Vector& x) const;
    Vector decision_scores(const Matrix& X) const;

    /// clamp(f / f_max, 0, 1), or the indicator of f >= 0 when f_max is zero.
    double membership(const Vector& x) const;
    Vector memberships(const Matrix& X) const;
    double membership_from_score(double f) const noexcept;

    nlohmann::json to_json() const;
    static OneClassSvm from_json(const nlohmann::json& j);

private:
    double score_standardized(const double* x) const noexcept;

    Standardizer standardizer_;
    RowMatrix support_;
    Vector alpha_;
    double rho_;
    double sigma_;
    double gamma_;
    double nu_;
    Eigen::Index training_rows_;
    double f_max_ = 0.0;

    friend OneClassSvm fit_ocsvm(const Matrix& X, double sigma, double nu);
};

/// Throws InvalidSpec for sigma <= 0 or nu outside (0, 1], InvalidDataset for fewer
/// than two rows, FitFailure when SMO does not converge within 10 n passes.
OneClassSvm fit_ocsvm(const Matrix& X, double sigma, double nu);

inline double decision_score(const OneClassSvm& model, const Vector& x) {
    return model.decision_score(x);
}
inline double membership(const OneClassSvm& model, const Vector& x) { return model.membership(x); }

} // namespace autohybrid
