// Acceptance checks: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 4 9`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "autohybrid/benchmark.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/grid_search.hpp"
#include "autohybrid/hybrid_tpe.hpp"
#include "autohybrid/io.hpp"
#include "autohybrid/log.hpp"
#include "autohybrid/renewables.hpp"
#include "support/bowl.hpp"
#include "support/naive_grid.hpp"
#include "support/turbine.hpp"

using namespace autohybrid;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kOracleMaeTol = 1e-9;
constexpr double kRuntimeC1 = 60.0;
constexpr double kParityRatio = 0.15;
constexpr double kRuntimeC3 = 30 * 60.0;
constexpr int kFuzzInputs = 1000;
constexpr int kFuzzHybrids = 20;
constexpr double kDualSumTol = 1e-6;
constexpr double kPowerLawRelTol = 1e-12;
constexpr double kAlphaTrue = 0.20;
constexpr double kAlphaTolClean = 0.01;
constexpr double kAlphaTolNoisy = 0.03;
constexpr double kRuntimeC8 = 10.0;
constexpr double kTMultiplier = 2.776;
constexpr double kTMultiplierTol = 0.005;
constexpr int kExtrapSeedsNeeded = 4;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
    bool pass;
    std::string detail;
};

Dataset normalized(Dataset d) {
    d.target = min_max_normalize(d.target);
    return d;
}

// ---------------------------------------------------------------------------

Verdict c1_oracle() {
    const auto start = Clock::now();
    const auto data = normalized(synthetic_friedman(200, 5, 1));
    const auto split = make_split(data.rows(), 1);
    const auto grid = micro_hybrid_grid(1);
    auto cache = fit_submodel_pool(grid.predictors, grid.deciders, split, data);
    const auto cached = combine_cached(cache, fold_truth(split, data));
    const auto naive = oracle::naive_ranking(grid, split, data);
    bool same_order = cached.size() == naive.size();
    double worst = 0.0;
    for (std::size_t k = 0; same_order && k < cached.size(); ++k) {
        same_order = cached[k].interp == naive[k].interp && cached[k].extrap == naive[k].extrap &&
                     cached[k].decider == naive[k].decider;
        worst = std::max(worst, std::abs(cached[k].mean_mae - naive[k].mean_mae));
    }
    const double secs = since(start);
    return {same_order && worst <= kOracleMaeTol && secs < kRuntimeC1,
            fmt::format("{} triples, identical order={}, max |dMAE|={:.2e} (tol {:.0e}), {:.1f} s (limit {:.0f})",
                        cached.size(), same_order, worst, kOracleMaeTol, secs, kRuntimeC1)};
}

Verdict c2_fit_counts() {
    const auto data = normalized(synthetic_friedman(200, 5, 2));
    const auto split = make_split(data.rows(), 2);
    const auto grid = default_hybrid_grid(2);
    auto cache = fit_submodel_pool(grid.predictors, grid.deciders, split, data);
    combine_cached(cache, fold_truth(split, data));
    const auto per_fold = cache.fits_performed / static_cast<std::size_t>(cache.folds);
    return {per_fold == 79 && cache.fits_performed == 316 && cache.combinations_evaluated == 61440,
            fmt::format("{} predictors + {} deciders; fits per fold {} (want 79), total {} (want 316), "
                        "combinations {} (want 61440)",
                        grid.predictors.size(), grid.deciders.size(), per_fold, cache.fits_performed,
                        cache.combinations_evaluated)};
}

Verdict c3_parity() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        if (since(start) > kRuntimeC3) {
            pass = false;
            detail += fmt::format("[friedman_{}: skipped, budget spent] ", seed);
            continue;
        }
        const auto data = normalized(synthetic_friedman(500, 5, seed));
        const auto split = make_split(data.rows(), seed);
        const auto grid = grid_search_hybrid(data, default_hybrid_grid(seed), split);
        HybridTpeOptions opts;
        opts.settings.n_trials = 500;
        opts.settings.seed = seed;
        const auto tpe = tpe_search_hybrid(data, split, opts);
        const double ratio = std::abs(grid.report.test_mae - tpe.report.test_mae) / grid.report.test_mae;
        const bool ok = ratio <= kParityRatio && grid.report.total_seconds < tpe.report.total_seconds;
        pass = pass && ok;
        detail += fmt::format("[friedman_{}: grid {:.4f} in {:.0f} s, tpe {:.4f} in {:.0f} s, ratio {:.3f}] ",
                              seed, grid.report.test_mae, grid.report.total_seconds, tpe.report.test_mae,
                              tpe.report.total_seconds, ratio);
    }
    const double secs = since(start);
    return {pass && secs < kRuntimeC3,
            detail + fmt::format("ratio tol {:.2f}, total {:.0f} s (limit {:.0f})", kParityRatio, secs, kRuntimeC3)};
}

Verdict c4_blending() {
    std::mt19937_64 rng(4);
    const std::vector<LearnerSpec> specs{LearnerSpec::linear(), LearnerSpec::mlp(5, 1), LearnerSpec::svr(0.5),
                                         LearnerSpec::random_forest(20, 1), LearnerSpec::gradient_boosting(20, 1)};
    long violations = 0, far_mismatch = 0;
    for (int k = 0; k < kFuzzHybrids; ++k) {
        auto data = synthetic_friedman(60, 5, 40 + static_cast<std::uint64_t>(k));
        const auto interp = fit(specs[rng() % specs.size()], data);
        const auto extrap = fit(specs[rng() % specs.size()], data);
        const double sigma = std::exp(std::uniform_real_distribution<double>(std::log(0.01), std::log(10.0))(rng));
        const auto decider = fit_ocsvm(data.features, sigma, 0.05);
        const auto h = assemble(interp, extrap, decider);

        Matrix Q(kFuzzInputs, 5);
        std::uniform_real_distribution<double> u(-1.0, 2.0);
        for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = u(rng);
        const auto y = h.predict(Q), a = interp.predict(Q), b = extrap.predict(Q);
        for (Eigen::Index i = 0; i < y.size(); ++i)
            violations += y(i) < std::min(a(i), b(i)) || y(i) > std::max(a(i), b(i));

        // more than 10 sigma from every training row, in the decider's standardized units
        const auto& st = decider.standardizer();
        Matrix far(10, 5);
        for (Eigen::Index i = 0; i < far.rows(); ++i)
            for (Eigen::Index j = 0; j < 5; ++j)
                far(i, j) = st.mean()(j) + st.scale()(j) * (j == i % 5 ? 1.0 : 0.0) *
                                               (10.0 * sigma + 5.0 + static_cast<double>(i));
        const auto yf = h.predict(far), ef = extrap.predict(far);
        for (Eigen::Index i = 0; i < yf.size(); ++i) far_mismatch += yf(i) != ef(i);
    }
    return {violations == 0 && far_mismatch == 0,
            fmt::format("convex-bound violations {} of {}; far-field mismatches {} of {}", violations,
                        kFuzzInputs * kFuzzHybrids, far_mismatch, 10 * kFuzzHybrids)};
}

Verdict c5_nu_property() {
    bool pass = true;
    double worst_excess = -1.0, worst_sum = 0.0;
    int fits = 0;
    for (double nu : {0.01, 0.05, 0.1})
        for (int n : {200, 500})
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                std::mt19937_64 rng(seed * 1000 + static_cast<std::uint64_t>(n));
                std::normal_distribution<double> nd;
                Matrix X(n, 2);
                for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = nd(rng);
                const auto m = fit_ocsvm(X, 1.0, nu);
                ++fits;
                const auto f = m.decision_scores(X);
                const double frac = static_cast<double>((f.array() < 0).count()) / n;
                const double bound = nu + 2.0 / std::sqrt(static_cast<double>(n));
                worst_excess = std::max(worst_excess, frac - bound);
                const auto& a = m.dual_coefficients();
                const double cap = 1.0 / (nu * n);
                worst_sum = std::max(worst_sum, std::abs(a.sum() - 1.0));
                pass = pass && frac <= bound && a.minCoeff() >= 0.0 && a.maxCoeff() <= cap * (1 + 1e-12) &&
                       std::abs(a.sum() - 1.0) <= kDualSumTol;
            }
    return {pass, fmt::format("{} fits; max(outlier fraction - bound) = {:.4f}; max |sum alpha - 1| = {:.1e} (tol {:.0e})",
                              fits, worst_excess, worst_sum, kDualSumTol)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict c6_tpe_vs_random() {
    const auto space = oracle::bowl_space();
    std::vector<double> tpe, rnd;
    bool monotone = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TpeSettings s;
        s.n_trials = 100;
        s.seed = seed;
        const auto a = run_tpe(oracle::bowl, space, s);
        const auto b = run_random_search(oracle::bowl, space, s);
        tpe.push_back(a.trace.back());
        rnd.push_back(b.trace.back());
        for (const auto* tr : {&a.trace, &b.trace})
            for (std::size_t i = 1; i < tr->size(); ++i) monotone = monotone && (*tr)[i] <= (*tr)[i - 1];
    }
    const double mt = median(tpe), mr = median(rnd);
    return {mt < mr && monotone,
            fmt::format("median final Q: tpe {:.4g}, random {:.4g}; traces monotone={}", mt, mr, monotone)};
}

Verdict c7_power_law() {
    bool exact = true;
    for (double v : {0.0, 2.5, 7.1, 30.0}) {
        exact = exact && height_correct(v, WindSiteConfig(37.0, 37.0, 0.27)) == v;
        exact = exact && height_correct(v, WindSiteConfig(10.0, 120.0, 0.0)) == v;
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double h1 = 2 + 100 * u(rng), h2 = 2 + 200 * u(rng), a = 0.7 * u(rng), v = 40 * u(rng);
        const double got = height_correct(v, WindSiteConfig(h1, h2, a));
        const double want = v * std::exp(a * std::log(h2 / h1));
        if (want > 0) worst = std::max(worst, std::abs(got - want) / want);
    }
    return {exact && worst <= kPowerLawRelTol,
            fmt::format("identity cases exact={}; max relative error {:.2e} over 1e5 fuzzed inputs (tol {:.0e})",
                        exact, worst, kPowerLawRelTol)};
}

Verdict c8_alpha_recovery() {
    const auto start = Clock::now();
    const auto curve = oracle::reference_turbine();
    const auto wind = oracle::site_wind(5000, 8);
    const double h1 = 10, h2 = 100;
    const auto clean = wp_forecast(curve, WindSiteConfig(h1, h2, kAlphaTrue), wind);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0.0, 0.05);
    auto noisy = clean;
    for (auto& p : noisy) p *= 1.0 + nd(rng);
    const auto grid = default_alpha_grid();
    const double a_clean = calibrate_alpha(curve, h1, h2, wind, clean, grid);
    const double a_noisy = calibrate_alpha(curve, h1, h2, wind, noisy, grid);
    const double secs = since(start);
    return {std::abs(a_clean - kAlphaTrue) <= kAlphaTolClean + 1e-12 &&
                std::abs(a_noisy - kAlphaTrue) <= kAlphaTolNoisy + 1e-12 && secs < kRuntimeC8,
            fmt::format("alpha* noise-free {:.2f} (tol {:.2f}), 5% noise {:.2f} (tol {:.2f}), {:.2f} s", a_clean,
                        kAlphaTolClean, a_noisy, kAlphaTolNoisy, secs)};
}

// Student-t inverse CDF by Simpson integration of the density plus bisection.
double t_quantile_oracle(double p, double v) {
    auto pdf = [v](double x) {
        return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2) - 0.5 * std::log(v * M_PI) -
                        (v + 1) / 2 * std::log1p(x * x / v));
    };
    auto cdf = [&](double t) {
        const int n = 4000;
        const double h = t / n;
        double s = pdf(0) + pdf(t);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * pdf(i * h);
        return 0.5 + s * h / 3;
    };
    double lo = 0, hi = 100;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Verdict c9_statistics() {
    const double t = student_t_quantile(0.975, 4);
    const double oracle_t = t_quantile_oracle(0.975, 4);
    const std::vector<double> run{0.9, 0.5, 0.5, 0.3, 0.1};
    const auto agg = aggregate_traces(std::vector<std::vector<double>>(5, run));
    const bool zero = std::all_of(agg.half_width.begin(), agg.half_width.end(), [](double h) { return h == 0.0; });
    return {std::abs(t - kTMultiplier) <= kTMultiplierTol && std::abs(oracle_t - kTMultiplier) <= kTMultiplierTol && zero,
            fmt::format("t(0.975, 4) = {:.5f}, oracle {:.5f} (want {} +- {}); identical-run half-widths zero={}", t,
                        oracle_t, kTMultiplier, kTMultiplierTol, zero)};
}

Verdict c10_extrapolation_benefit() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto train = synthetic_sine_linear(300, 2, seed);
        // query rows outside the training box: every coordinate in [1.2, 2] or [-2, -1.2]
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> mag(1.2, 2.0);
        Matrix Q(500, 2);
        for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
        const Vector truth = sine_linear_response(Q);
        const auto mlp = fit(LearnerSpec::mlp(10, seed), train);
        const auto lr = fit(LearnerSpec::linear(seed), train);
        const auto h = assemble(mlp, lr, fit_ocsvm(train.features, 1.0, kDefaultNu));
        const double e_h = mae(h.predict(Q), truth), e_m = mae(mlp.predict(Q), truth);
        wins += e_h < e_m;
        detail += fmt::format("[seed {}: hybrid {:.3f} vs mlp {:.3f}] ", seed, e_h, e_m);
    }
    return {wins >= kExtrapSeedsNeeded, detail + fmt::format("wins {}/5 (need {})", wins, kExtrapSeedsNeeded)};
}

Verdict c11_pv_round_trip() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> kw(96 * 7);
    for (std::size_t t = 0; t < kw.size(); ++t) kw[t] = 42.5 * std::max(0.0, std::sin(M_PI * (t % 96) / 96.0)) * u(rng);
    const std::vector<std::vector<double>> profiles(6, kw);
    auto fleet = pv_build_template(profiles, std::vector<double>(6, 42.5));
    bool exact = true;
    for (const auto& id : fleet.plant_ids) exact = exact && pv_forecast(fleet, id) == kw;
    std::vector<double> predicted(200), observed(200);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        predicted[i] = u(rng);
        observed[i] = 0.8 * 42.5 * predicted[i];
    }
    const double c = pv_calibrate(fleet, fleet.plant_ids[0], observed, predicted);
    return {exact && c == 0.8, fmt::format("retransform exact={} for 6 identical plants; recovered c = {:.17g}", exact, c)};
}

std::vector<std::string> strip_wall_time(const fs::path& p, bool has_wall_time) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(has_wall_time ? l.substr(0, l.rfind(',')) : l);
    return out;
}

Verdict c12_determinism() {
    const auto dir = fs::temp_directory_path() / "autohybrid_acceptance_c12";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_csv_dataset(dir / "fried.csv", synthetic_friedman(80, 5, 12));
    write_csv_dataset(dir / "sine.csv", synthetic_sine_linear(80, 2, 12));
    ExperimentConfig cfg;
    cfg.datasets = {{dir / "fried.csv", "y"}, {dir / "sine.csv", "y"}};
    cfg.methods = {"grid", "tpe"};
    cfg.seeds = {0, 1};
    cfg.tpe.n_trials = 30;
    cfg.grid = "micro";
    cfg.output_dir = dir / "a";
    const auto a = run_benchmark(cfg, 1);
    cfg.output_dir = dir / "b";
    const auto b = run_benchmark(cfg, 2);
    const bool results = strip_wall_time(dir / "a" / "results.csv", true) == strip_wall_time(dir / "b" / "results.csv", true);
    const bool conv = strip_wall_time(dir / "a" / "convergence.csv", false) ==
                      strip_wall_time(dir / "b" / "convergence.csv", false);
    const auto rows = strip_wall_time(dir / "a" / "results.csv", true).size() - 1;
    return {a.exit_code == 0 && b.exit_code == 0 && results && conv && rows == 8,
            fmt::format("{} result rows; results.csv identical={} convergence.csv identical={} (1 vs 2 jobs)", rows,
                        results, conv)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv) {
    set_log_level(LogLevel::quiet);
    const std::vector<Criterion> all{
        {1, "cached-grid oracle equivalence", c1_oracle},
        {2, "fit-count linearity", c2_fit_counts},
        {3, "grid-vs-TPE parity and speed", c3_parity},
        {4, "hybrid blending properties", c4_blending},
        {5, "1C-SVM nu-property and dual feasibility", c5_nu_property},
        {6, "TPE beats random", c6_tpe_vs_random},
        {7, "power-law checks", c7_power_law},
        {8, "alpha recovery", c8_alpha_recovery},
        {9, "statistics", c9_statistics},
        {10, "hybrid extrapolation benefit", c10_extrapolation_benefit},
        {11, "PV round trip and calibration", c11_pv_round_trip},
        {12, "end-to-end determinism", c12_determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = Clock::now();
        Verdict v{false, ""};
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s [%d] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                    since(start));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
