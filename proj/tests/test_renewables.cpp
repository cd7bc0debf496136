#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "autohybrid/error.hpp"
#include "autohybrid/renewables.hpp"
#include "support/turbine.hpp"

using namespace autohybrid;

TEST(PowerLaw, IdentityCases) {
    for (double v : {0.0, 3.3, 17.25}) {
        EXPECT_EQ(height_correct(v, WindSiteConfig(40, 40, 0.3)), v);
        EXPECT_EQ(height_correct(v, WindSiteConfig(10, 120, 0.0)), v);
    }
}

TEST(PowerLaw, SeventhRootExample) {
    // 8^(1/7) = 2^(3/7) = 1.3459001926323562...
    EXPECT_NEAR(height_correct(5, WindSiteConfig(10, 80, 1.0 / 7)), 5 * 1.3459001926323562, 1e-12);
}

TEST(PowerLaw, MonotoneAndHomogeneous) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 1);
    for (int i = 0; i < 1000; ++i) {
        const double h1 = 5 + 50 * u(rng), h2 = h1 * (1 + 3 * u(rng)), a = 0.6 * u(rng), v = 20 * u(rng);
        const double base = height_correct(v, WindSiteConfig(h1, h2, a));
        EXPECT_NEAR(height_correct(3 * v, WindSiteConfig(h1, h2, a)), 3 * base, 1e-12 * std::max(1.0, base));
        EXPECT_GE(height_correct(v, WindSiteConfig(h1, h2, a + 0.05)), base);
        const double direct = v * std::exp(a * std::log(h2 / h1));
        EXPECT_NEAR(base, direct, 1e-12 * std::max(1.0, direct));
    }
}

TEST(PowerLaw, InvalidSite) {
    EXPECT_THROW(WindSiteConfig(0, 10, 0.1), InvalidConfig);
    EXPECT_THROW(WindSiteConfig(10, -1, 0.1), InvalidConfig);
    EXPECT_THROW(WindSiteConfig(10, 10, std::nan("")), InvalidConfig);
}

TEST(Curve, Sections) {
    const auto c = oracle::reference_turbine();
    EXPECT_EQ(power_curve_eval(c, 2.9), 0.0);
    EXPECT_EQ(power_curve_eval(c, 25.0), 0.0);
    EXPECT_EQ(power_curve_eval(c, 30.0), 0.0);
    for (std::size_t i = 7; i < c.speeds().size() - 1; ++i)
        EXPECT_EQ(power_curve_eval(c, c.speeds()[i]), c.powers()[i]) << c.speeds()[i];
    EXPECT_NEAR(power_curve_eval(c, 8.25), 0.5 * (c.powers()[16] + c.powers()[17]), 1e-9);
    EXPECT_EQ(c.rated(), 2000.0);
}

TEST(Curve, ContinuousBetweenCutInAndCutOut) {
    const auto c = oracle::reference_turbine();
    for (double v = 3.0; v < 24.99; v += 0.01) EXPECT_LT(std::abs(c(v + 1e-7) - c(v)), 1e-3);
}

TEST(Curve, DefaultsAndValidation) {
    const PowerCurve c({0, 3, 4, 10, 20}, {0, 0, 100, 1000, 1000});
    EXPECT_EQ(c.cut_in(), 3.0);
    EXPECT_EQ(c.cut_out(), 20.0);
    EXPECT_EQ(c.rated(), 1000.0);
    EXPECT_THROW(PowerCurve({0, 2, 1}, {0, 1, 2}), InvalidCurve);
    EXPECT_THROW(PowerCurve({0, 1}, {0, -1}), InvalidCurve);
    EXPECT_THROW(PowerCurve({0, 1, 2}, {0, 1}), InvalidCurve);
}

TEST(WindForecast, CurveOfCorrectedWind) {
    const auto c = oracle::reference_turbine();
    const WindSiteConfig site(10, 100, 0.2);
    const std::vector<double> wind{2, 4, 6, 8};
    const auto p = wp_forecast(c, site, wind);
    ASSERT_EQ(p.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p[i], c(height_correct(wind[i], site)));
}

TEST(Alpha, GridParsing) {
    const auto g = parse_alpha_grid("0.05:0.60:0.01");
    ASSERT_EQ(g.size(), 56u);
    EXPECT_DOUBLE_EQ(g.front(), 0.05);
    EXPECT_DOUBLE_EQ(g.back(), 0.60);
    EXPECT_EQ(default_alpha_grid(), g);
    EXPECT_THROW(parse_alpha_grid("0.1:0.2"), ParseError);
    EXPECT_THROW(parse_alpha_grid("0.3:0.2:0.01"), ParseError);
    EXPECT_THROW(parse_alpha_grid("a:b:c"), ParseError);
}

TEST(Alpha, RecoversGeneratingValue) {
    const auto c = oracle::reference_turbine();
    const auto wind = oracle::site_wind(2000, 3);
    const auto observed = wp_forecast(c, WindSiteConfig(10, 100, 0.20), wind);
    EXPECT_NEAR(calibrate_alpha(c, 10, 100, wind, observed, default_alpha_grid()), 0.20, 0.01);
}

TEST(Alpha, FuzzedWithinOneStep) {
    const auto c = oracle::reference_turbine();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 20; ++k) {
        const double step = 0.005 + 0.02 * u(rng);
        const double alpha = 0.1 + 0.3 * u(rng);
        std::vector<double> grid;
        for (double a = 0.0; a <= 0.6 + 1e-12; a += step) grid.push_back(a);
        const auto wind = oracle::site_wind(500, static_cast<std::uint64_t>(k));
        const auto observed = wp_forecast(c, WindSiteConfig(10, 80, alpha), wind);
        EXPECT_LE(std::abs(calibrate_alpha(c, 10, 80, wind, observed, grid) - alpha), step + 1e-12);
    }
}

TEST(Alpha, TrivialCases) {
    const auto c = oracle::reference_turbine();
    const auto wind = oracle::site_wind(100, 5);
    const auto at_zero = wp_forecast(c, WindSiteConfig(10, 100, 0.0), wind);
    EXPECT_EQ(calibrate_alpha(c, 10, 100, wind, at_zero, parse_alpha_grid("0:0.5:0.01")), 0.0);
    EXPECT_EQ(calibrate_alpha(c, 10, 100, wind, at_zero, {0.33}), 0.33);
    EXPECT_THROW(calibrate_alpha(c, 10, 100, wind, {1.0}, {0.1}), LengthMismatch);
    EXPECT_THROW(calibrate_alpha(c, 10, 100, wind, at_zero, {}), EmptyInput);
}

TEST(Pv, BuildTemplate) {
    const auto one = pv_build_template({{5.0}}, {10.0});
    EXPECT_EQ(one.average_profile(), std::vector<double>{0.5});
    EXPECT_EQ(one.plant_ids, std::vector<std::string>{"plant_0"});
    const auto two = pv_build_template({{1, 2, 3}, {2, 4, 6}}, {4, 8});
    EXPECT_EQ(two.average_profile(), (std::vector<double>{0.25, 0.5, 0.75}));
    const auto mixed = pv_build_template({{3, 3}, {1, 1}}, {10, 10}, {"a", "b"});
    EXPECT_DOUBLE_EQ(mixed.average_profile()[0], 0.2);
    EXPECT_THROW(pv_build_template({{1, 2}, {1}}, {1, 1}), MisalignedSeries);
    EXPECT_THROW(pv_build_template({{1}}, {0}), NonPositiveNormalizer);
    EXPECT_THROW(pv_build_template({}, {}), EmptyInput);
    EXPECT_THROW(mixed.plant_index("zz"), UnknownPlant);
}

TEST(Pv, RoundTripIdenticalFleet) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> kw(96);
    for (auto& x : kw) x = 7.3 * u(rng);
    const auto fleet = pv_build_template({kw, kw, kw, kw, kw}, {7.3, 7.3, 7.3, 7.3, 7.3});
    const auto restored = PVFleetTemplate::from_json(nlohmann::json::parse(fleet.to_json().dump()));
    for (const auto& id : fleet.plant_ids) {
        EXPECT_EQ(pv_forecast(fleet, id), kw);
        EXPECT_EQ(pv_forecast(restored, id), kw);
    }
}

TEST(Pv, RoundTripScaledFleet) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> normalized(96);
    for (auto& x : normalized) x = u(rng);
    const std::vector<double> peaks{7.3, 12.1, 250.0, 0.9};
    std::vector<std::vector<double>> profiles;
    for (double p : peaks) {
        std::vector<double> kw;
        for (double x : normalized) kw.push_back(x * p);
        profiles.push_back(kw);
    }
    const auto fleet = pv_build_template(profiles, peaks);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const auto back = pv_forecast(fleet, fleet.plant_ids[i]);
        for (std::size_t t = 0; t < back.size(); ++t)
            EXPECT_NEAR(back[t], profiles[i][t], 1e-12 * peaks[i]);
    }
}

TEST(Pv, CalibrateExactScaling) {
    auto fleet = pv_build_template({{1, 2}}, {10}, {"p"});
    std::vector<double> predicted{0.1, 0.4, 0.0, 0.7, 0.55, 0.9, 0.23};
    std::vector<double> observed, unscaled;
    for (double x : predicted) {
        observed.push_back(0.8 * 10 * x);
        unscaled.push_back(10 * x);
    }
    EXPECT_EQ(pv_calibrate(fleet, "p", observed, predicted), 0.8);
    EXPECT_EQ(fleet.calibration[0], 0.8);
    EXPECT_EQ(pv_calibrate(fleet, "p", unscaled, predicted), 1.0);
    // at this peak the ratio breakpoints land an ulp below 0.8
    auto odd = pv_build_template({{1, 2}}, {42.5}, {"p"});
    observed.clear();
    for (double x : predicted) observed.push_back(0.8 * 42.5 * x);
    EXPECT_EQ(pv_calibrate(odd, "p", observed, predicted), 0.8);
    EXPECT_THROW(pv_calibrate(fleet, "p", {1.0}, predicted), LengthMismatch);
    EXPECT_THROW(pv_calibrate(fleet, "p", {0, 0}, {0, 0}), DegeneratePrediction);
    EXPECT_THROW(pv_calibrate(fleet, "q", observed, predicted), UnknownPlant);
}

TEST(Pv, CalibrateNoisyScaling) {
    auto fleet = pv_build_template({{1}}, {50}, {"p"});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::normal_distribution<double> nd(0, 0.05);
    std::vector<double> predicted, observed;
    for (int i = 0; i < 500; ++i) {
        predicted.push_back(u(rng));
        observed.push_back(0.9 * 50 * predicted.back() * (1 + nd(rng)));
    }
    EXPECT_NEAR(pv_calibrate(fleet, "p", observed, predicted), 0.9, 0.05);
}

TEST(Pv, ForecastClampsAtZero) {
    const auto fleet = pv_build_template({{1}}, {10}, {"p"});
    EXPECT_EQ(pv_forecast(fleet, "p", {-0.2, 0.5}), (std::vector<double>{0.0, 5.0}));
}

TEST(Twins, Flags) {
    const std::vector<double> a(20, 1000.0);
    EXPECT_EQ(twin_anomaly_flags(a, a, 1000), std::vector<bool>(20, false));
    std::vector<double> b = a;
    for (int i = 5; i < 15; ++i) b[static_cast<std::size_t>(i)] = 0.0;
    const auto f = twin_anomaly_flags(a, b, 1000, 0.5, 3);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(f[static_cast<std::size_t>(i)], i >= 5 && i < 15) << i;
    std::vector<double> spike = a;
    spike[7] = 0.0;
    EXPECT_EQ(twin_anomaly_flags(a, spike, 1000, 0.5, 3), std::vector<bool>(20, false));
    EXPECT_THROW(twin_anomaly_flags(a, {1.0}, 1000), LengthMismatch);
    EXPECT_THROW(twin_anomaly_flags(a, a, 0), NonPositiveNormalizer);
}
