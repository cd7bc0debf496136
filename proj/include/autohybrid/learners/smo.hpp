#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "autohybrid/dataset.hpp"

namespace autohybrid::learners {

/// RBF Gram access over standardized rows: k(u,v) = exp(-|u-v|^2 / (2 sigma^2)).
/// Holds the full matrix up to `kFullCacheLimit` rows and computes rows on demand above.
class RbfKernel {
public:
    static constexpr Eigen::Index kFullCacheLimit = 4000;

    RbfKernel(const RowMatrix& rows, double sigma);

    Eigen::Index size() const noexcept { return rows_.rows(); }
    double gamma() const noexcept { return gamma_; }
    /// Row i of the Gram matrix; valid until the next call.
    std::span<const double> row(Eigen::Index i) const;
    double operator()(Eigen::Index i, Eigen::Index j) const;

private:
    const RowMatrix& rows_;
    double gamma_;
    Vector sq_norms_;
    Matrix full_;                        // empty when on demand
    mutable std::vector<double> scratch_;
    mutable Eigen::Index scratch_row_ = -1;
};

double rbf(std::span<const double> u, std::span<const double> v, double gamma) noexcept;

/// min 1/2 a'Qa + p'a  s.t.  y'a = const, 0 <= a_t <= upper_t,  Q_ts = y_t y_s K(t', s'),
/// solved by SMO pairwise updates with second-order working-set selection.
struct SmoProblem {
    std::vector<double> p;
    std::vector<signed char> y;          // +1 / -1
    std::vector<double> upper;
    std::vector<double> alpha;           // feasible starting point
    /// Kernel row for variable t (length = number of kernel rows).
    std::function<std::span<const double>(std::size_t)> kernel_row;
    /// Maps a variable index to its kernel row index.
    std::function<std::size_t(std::size_t)> kernel_index;
};

struct SmoResult {
    std::vector<double> alpha;
    double rho = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// `tolerance` bounds the maximal KKT violation; `max_iterations` caps pair updates.
SmoResult solve_smo(SmoProblem problem, double tolerance, std::size_t max_iterations);

} // namespace autohybrid::learners
