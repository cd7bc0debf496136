#include "autohybrid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid {

Fold SplitPlan::fold(int k) const {
    Fold f;
    for (std::size_t i = 0; i < tuning.size(); ++i)
        (fold_of[i] == k ? f.validation : f.train).push_back(tuning[i]);
    return f;
}

SplitPlan make_split(Eigen::Index n, std::uint64_t seed, int folds) {
    if (n < 20) throw TooFewRows(fmt::format("a split needs at least 20 rows, got {}", n));
    if (folds < 2) throw TooFewRows("a split needs at least two folds");
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    SplitPlan plan;
    plan.seed = seed;
    plan.folds = folds;
    const auto n_test = static_cast<std::size_t>(std::floor(kTestFraction * static_cast<double>(n)));
    plan.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    plan.tuning.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    plan.fold_of.resize(plan.tuning.size());
    for (std::size_t i = 0; i < plan.tuning.size(); ++i)
        plan.fold_of[i] = static_cast<int>(i % static_cast<std::size_t>(folds));
    return plan;
}

double mae(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw LengthMismatch(fmt::format("mae: {} predictions vs {} targets", pred.size(),
                                         truth.size()));
    if (pred.empty()) throw EmptyInput("mae of empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
    return sum / static_cast<double>(pred.size());
}

double mae(const Vector& pred, const Vector& truth) {
    return mae(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
               std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())));
}

double nmae(std::span<const double> pred, std::span<const double> truth, double normalizer) {
    if (!(normalizer > 0.0)) throw NonPositiveNormalizer("nMAE normalizer must be positive");
    return mae(pred, truth) / normalizer;
}

double mean_cv_score(std::span<const double> per_fold_mae) {
    if (per_fold_mae.empty()) throw EmptyInput("no fold scores");
    return std::accumulate(per_fold_mae.begin(), per_fold_mae.end(), 0.0) /
           static_cast<double>(per_fold_mae.size());
}

namespace {

// Continued fraction of the regularized incomplete beta function (modified Lentz).
double beta_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_fraction(a, b, x) / a;
    return 1.0 - std::exp(log_front) * beta_fraction(b, a, 1.0 - x) / b;
}

} // namespace

double student_t_cdf(double t, double dof) {
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile probability must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, dof);
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_cdf(hi, dof) < p) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ConfidenceInterval t_confidence_interval(std::span<const double> values, double level) {
    if (values.size() < 2) throw TooFewValues("a confidence interval needs at least two values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return {*lo, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double t = student_t_quantile(1.0 - (1.0 - level) / 2.0, n - 1.0);
    return {mean, t * sd / std::sqrt(n)};
}

std::vector<double> best_so_far(std::span<const double> scores) {
    std::vector<double> out(scores.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        best = std::min(best, scores[i]);
        out[i] = best;
    }
    return out;
}

ConvergenceTrace aggregate_traces(std::vector<std::vector<double>> runs, double level) {
    if (runs.size() < 2) throw TooFewValues("aggregation needs at least two runs");
    const auto len = runs.front().size();
    for (const auto& r : runs)
        if (r.size() != len) throw LengthMismatch("convergence traces differ in length");
    ConvergenceTrace out;
    out.mean.resize(len);
    out.half_width.resize(len);
    std::vector<double> column(runs.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r][t];
        // sorted so the result does not depend on run order
        std::sort(column.begin(), column.end());
        const auto ci = t_confidence_interval(column, level);
        out.mean[t] = ci.mean;
        out.half_width[t] = ci.half_width;
    }
    out.runs = std::move(runs);
    return out;
}

Vector min_max_normalize(const Vector& v) {
    if (v.size() == 0) return v;
    const double lo = v.minCoeff();
    const double hi = v.maxCoeff();
    if (!(hi > lo)) return Vector::Zero(v.size());
    return (v.array() - lo) / (hi - lo);
}

} // namespace autohybrid
