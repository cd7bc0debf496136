#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autohybrid/dataset.hpp"

namespace autohybrid {

struct Fold {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> validation;
};

/// Hold-out test rows plus a k-fold partition of the remaining (tuning) rows.
/// With the defaults each fold trains on 60 % and validates on 20 % of all rows.
struct SplitPlan {
    std::uint64_t seed = 0;
    std::vector<Eigen::Index> tuning;
    std::vector<Eigen::Index> test;
    std::vector<int> fold_of;  // parallel to `tuning`
    int folds = 4;

    std::size_t rows() const noexcept { return tuning.size() + test.size(); }
    Fold fold(int k) const;
};

inline constexpr int kDefaultFolds = 4;
inline constexpr double kTestFraction = 0.2;

/// Shuffles 0..n-1 with the seed, takes the first floor(0.2 n) rows as test and
/// deals the rest round-robin into the folds. Throws TooFewRows for n < 20.
SplitPlan make_split(Eigen::Index n, std::uint64_t seed, int folds = kDefaultFolds);

/// Throws LengthMismatch or EmptyInput.
double mae(std::span<const double> pred, std::span<const double> truth);
double mae(const Vector& pred, const Vector& truth);

/// mae / normalizer as a fraction. Throws NonPositiveNormalizer.
double nmae(std::span<const double> pred, std::span<const double> truth, double normalizer);

/// Arithmetic mean. Throws EmptyInput.
double mean_cv_score(std::span<const double> per_fold_mae);

double student_t_cdf(double t, double dof);
/// Inverse of student_t_cdf by bisection.
double student_t_quantile(double p, double dof);

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Two-sided Student-t interval of the mean. Throws TooFewValues for fewer than two values.
ConfidenceInterval t_confidence_interval(std::span<const double> values, double level = 0.95);

/// Running minimum of a score sequence.
std::vector<double> best_so_far(std::span<const double> scores);

/// Per-run best-so-far traces and their per-trial aggregate.
struct ConvergenceTrace {
    std::vector<std::vector<double>> runs;
    std::vector<double> mean;
    std::vector<double> half_width;
};

/// Per-trial mean and t-interval half-width across runs of equal length.
/// Throws LengthMismatch, TooFewValues (fewer than two runs).
ConvergenceTrace aggregate_traces(std::vector<std::vector<double>> runs, double level = 0.95);

/// Min-max scaling to [0, 1]; a constant vector maps to zeros.
Vector min_max_normalize(const Vector& v);

} // namespace autohybrid
