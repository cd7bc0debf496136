#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "autohybrid/error.hpp"
#include "autohybrid/one_class_svm.hpp"

using namespace autohybrid;

namespace {

Matrix gaussian(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = nd(rng);
    return X;
}

Matrix rbf_gram(const Matrix& Z, double sigma) {
    const auto n = Z.rows();
    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            K(i, j) = std::exp(-(Z.row(i) - Z.row(j)).squaredNorm() / (2 * sigma * sigma));
    return K;
}

// Euclidean projection onto {0 <= a <= cap, sum a = 1} by bisection on the shift.
Vector project_capped_simplex(const Vector& v, double cap) {
    double lo = v.minCoeff() - cap - 1, hi = v.maxCoeff() + 1;
    for (int it = 0; it < 200; ++it) {
        const double t = 0.5 * (lo + hi);
        const double s = (v.array() - t).max(0.0).min(cap).sum();
        (s > 1 ? lo : hi) = t;
    }
    return (v.array() - 0.5 * (lo + hi)).max(0.0).min(cap);
}

// Generic projected-gradient solver for min 1/2 a'Ka over the capped simplex.
double qp_oracle(const Matrix& K, double cap) {
    const auto n = K.rows();
    Vector a = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const double step = 1.0 / K.operatorNorm();
    for (int it = 0; it < 20000; ++it) a = project_capped_simplex(a - step * K * a, cap);
    return 0.5 * a.dot(K * a);
}

double smo_objective(const OneClassSvm& m) {
    const Matrix S = m.support_vectors();
    const Vector& a = m.dual_coefficients();
    return 0.5 * a.dot(rbf_gram(S, m.sigma()) * a);
}

void expect_feasible(const OneClassSvm& m, Eigen::Index n) {
    const Vector& a = m.dual_coefficients();
    const double cap = 1.0 / (m.nu() * static_cast<double>(n));
    EXPECT_NEAR(a.sum(), 1.0, 1e-6);
    EXPECT_GE(a.minCoeff(), 0.0);
    EXPECT_LE(a.maxCoeff(), cap * (1 + 1e-12));
    EXPECT_GE(m.f_max(), 0.0);
}

} // namespace

TEST(Ocsvm, DualMatchesGenericQp) {
    for (double nu : {0.1, 0.3}) {
        const Matrix X = gaussian(50, 2, 3);
        const auto m = fit_ocsvm(X, 1.0, nu);
        expect_feasible(m, 50);
        const Matrix Z = Standardizer::fit(X).apply(X);
        const double oracle = qp_oracle(rbf_gram(Z, 1.0), 1.0 / (nu * 50));
        const double smo = smo_objective(m);
        EXPECT_GE(smo, oracle - 1e-9);
        EXPECT_LE(smo - oracle, 1e-3 * oracle) << "nu=" << nu;
    }
}

TEST(Ocsvm, IdenticalPointsInsideHull) {
    Matrix X(2, 2);
    X << 1, 2, 1, 2;
    for (double sigma : {0.01, 1.0, 10.0}) {
        const auto m = fit_ocsvm(X, sigma, 0.5);
        EXPECT_GE(m.decision_score(X.row(0).transpose()), -1e-12);
        EXPECT_GE(m.decision_score(X.row(1).transpose()), -1e-12);
    }
}

TEST(Ocsvm, NuProperty) {
    const Matrix X = gaussian(500, 2, 1);
    const auto m = fit_ocsvm(X, 1.0, 0.1);
    expect_feasible(m, 500);
    const auto f = m.decision_scores(X);
    EXPECT_LE((f.array() < 0).count() / 500.0, 0.12);
    for (double nu : {0.01, 0.05}) {
        const auto mn = fit_ocsvm(X, 1.0, nu);
        expect_feasible(mn, 500);
        const auto fn = mn.decision_scores(X);
        EXPECT_LE((fn.array() < 0).count() / 500.0, nu + 2 / std::sqrt(500.0));
    }
}

TEST(Ocsvm, FarPointScoresMinusRho) {
    const Matrix X = gaussian(100, 2, 2);
    const auto m = fit_ocsvm(X, 0.5, 0.1);
    Vector far(2);
    far << 1e3, -1e3;
    EXPECT_DOUBLE_EQ(m.decision_score(far), -m.rho());
    EXPECT_LT(m.decision_score(far), 0.0);
    EXPECT_EQ(m.membership(far), 0.0);
}

TEST(Ocsvm, MembershipDefinition) {
    const Matrix X = gaussian(120, 3, 4);
    const auto m = fit_ocsvm(X, 1.0, 0.05);
    const auto f = m.decision_scores(X);
    Eigen::Index arg = 0;
    EXPECT_DOUBLE_EQ(f.maxCoeff(&arg), m.f_max());
    EXPECT_DOUBLE_EQ(m.membership(X.row(arg).transpose()), 1.0);
    EXPECT_DOUBLE_EQ(m.membership_from_score(m.f_max() / 2), 0.5);
    EXPECT_EQ(m.membership_from_score(-0.1), 0.0);
    EXPECT_EQ(m.membership_from_score(0.0), 0.0);
}

TEST(Ocsvm, MembershipBoundedAndMonotoneFuzzed) {
    const Matrix X = gaussian(150, 2, 5);
    const auto m = fit_ocsvm(X, 0.7, 0.1);
    const Matrix Q = 3.0 * gaussian(10000, 2, 6);
    const auto f = m.decision_scores(Q);
    const auto mu = m.memberships(Q);
    std::vector<std::pair<double, double>> pairs;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        ASSERT_GE(mu(i), 0.0);
        ASSERT_LE(mu(i), 1.0);
        pairs.emplace_back(f(i), mu(i));
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) ASSERT_LE(pairs[i - 1].second, pairs[i].second);
}

TEST(Ocsvm, DecisionIsContinuous) {
    const Matrix X = gaussian(80, 2, 7);
    const auto m = fit_ocsvm(X, 0.5, 0.1);
    Vector x(2);
    x << 0.3, -0.2;
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {1e-2, 1e-4, 1e-6}) {
        Vector y = x;
        y(0) += h;
        const double diff = std::abs(m.decision_score(x) - m.decision_score(y));
        EXPECT_LE(diff, prev);
        prev = diff;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(Ocsvm, ShrinkingSigmaNeverGrowsSupportRegion) {
    const Matrix X = gaussian(200, 2, 8);
    Matrix grid(41 * 41, 2);
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 41; ++j) grid.row(i * 41 + j) << -4 + 0.2 * i, -4 + 0.2 * j;
    Eigen::Index previous = grid.rows();
    for (double sigma : {4.0, 2.0, 1.0, 0.5, 0.25}) {
        const auto mu = fit_ocsvm(X, sigma, 0.1).memberships(grid);
        const auto covered = (mu.array() > 0).count();
        // wide kernels settle on the nu-quantile contour and wobble by a cell or two
        EXPECT_LE(covered, previous + grid.rows() / 100) << "sigma=" << sigma;
        previous = covered;
    }
    EXPECT_LT(previous, grid.rows() / 10);
}

TEST(Ocsvm, ErrorsAndRoundTrip) {
    const Matrix X = gaussian(30, 2, 9);
    EXPECT_THROW(fit_ocsvm(X, 0.0, 0.1), InvalidSpec);
    EXPECT_THROW(fit_ocsvm(X, 1.0, 0.0), InvalidSpec);
    EXPECT_THROW(fit_ocsvm(X, 1.0, 1.5), InvalidSpec);
    EXPECT_THROW(fit_ocsvm(X.topRows(1), 1.0, 0.5), InvalidDataset);
    const auto m = fit_ocsvm(X, 1.0, 0.2);
    EXPECT_THROW(m.decision_score(Vector::Zero(3)), DimensionMismatch);
    const auto r = OneClassSvm::from_json(nlohmann::json::parse(m.to_json().dump()));
    EXPECT_LE((r.decision_scores(X) - m.decision_scores(X)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(r.f_max(), m.f_max());
}
