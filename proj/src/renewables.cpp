#include "autohybrid/renewables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "autohybrid/error.hpp"

namespace autohybrid {

PowerCurve::PowerCurve(std::vector<double> speeds_ms, std::vector<double> power_kw,
                       std::optional<double> cut_in, std::optional<double> cut_out,
                       std::optional<double> rated_kw)
    : speeds_(std::move(speeds_ms)), powers_(std::move(power_kw)) {
    if (speeds_.size() != powers_.size())
        throw InvalidCurve(fmt::format("{} speeds but {} power values", speeds_.size(), powers_.size()));
    if (speeds_.size() < 2) throw InvalidCurve("a power curve needs at least two points");
    for (std::size_t i = 0; i < speeds_.size(); ++i) {
        if (!std::isfinite(speeds_[i]) || !std::isfinite(powers_[i]))
            throw InvalidCurve("power curve values must be finite");
        if (speeds_[i] < 0.0) throw InvalidCurve("negative wind speed in power curve");
        if (powers_[i] < 0.0) throw InvalidCurve("negative power in power curve");
        if (i > 0 && !(speeds_[i] > speeds_[i - 1]))
            throw InvalidCurve(fmt::format("speeds must be strictly increasing (row {})", i + 1));
    }
    rated_ = rated_kw.value_or(*std::max_element(powers_.begin(), powers_.end()));
    if (!(rated_ > 0.0)) throw InvalidCurve("rated power must be positive");
    if (*std::max_element(powers_.begin(), powers_.end()) > rated_)
        throw InvalidCurve("table power exceeds rated power");

    if (cut_in) {
        cut_in_ = *cut_in;
    } else {
        const auto first_positive = std::find_if(powers_.begin(), powers_.end(),
                                                 [](double p) { return p > 0.0; });
        const auto idx = static_cast<std::size_t>(first_positive - powers_.begin());
        cut_in_ = idx == 0 || idx == powers_.size() ? speeds_.front() : speeds_[idx - 1];
    }
    cut_out_ = cut_out.value_or(speeds_.back());
    if (!(cut_out_ > cut_in_)) throw InvalidCurve("cut-out speed must exceed cut-in speed");
}

double PowerCurve::operator()(double v) const {
    if (!(v >= cut_in_) || v >= cut_out_) return 0.0;
    if (v <= speeds_.front()) return std::clamp(powers_.front(), 0.0, rated_);
    if (v >= speeds_.back()) return std::clamp(powers_.back(), 0.0, rated_);
    const auto hi = static_cast<std::size_t>(
        std::lower_bound(speeds_.begin(), speeds_.end(), v) - speeds_.begin());
    if (speeds_[hi] == v) return std::clamp(powers_[hi], 0.0, rated_);
    const auto lo = hi - 1;
    const double t = (v - speeds_[lo]) / (speeds_[hi] - speeds_[lo]);
    return std::clamp(powers_[lo] + t * (powers_[hi] - powers_[lo]), 0.0, rated_);
}

WindSiteConfig::WindSiteConfig(double h1_m, double h2_m, double a) : h1(h1_m), h2(h2_m), alpha(a) {
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw InvalidConfig("heights must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("alpha must lie in [0, 1]");
}

double height_correct(double v1, const WindSiteConfig& cfg) {
    return v1 * std::pow(cfg.h2 / cfg.h1, cfg.alpha);
}

double power_curve_eval(const PowerCurve& curve, double v_hub) { return curve(v_hub); }

std::vector<double> wp_forecast(const PowerCurve& curve, const WindSiteConfig& cfg,
                                const std::vector<double>& wind_at_h1) {
    std::vector<double> out(wind_at_h1.size());
    const double factor = std::pow(cfg.h2 / cfg.h1, cfg.alpha);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = curve(wind_at_h1[i] * factor);
    return out;
}

std::vector<double> parse_alpha_grid(const std::string& text) {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    char c1 = 0;
    char c2 = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf %c %lf %c %lf %c", &lo, &c1, &hi, &c2, &step, &extra) != 5 ||
        c1 != ':' || c2 != ':')
        throw ParseError(fmt::format("alpha grid '{}' is not of the form lo:hi:step", text));
    if (!(step > 0.0) || !(hi >= lo))
        throw ParseError(fmt::format("alpha grid '{}' needs step > 0 and hi >= lo", text));
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> grid;
    for (long i = 0; i <= n; ++i) grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return grid;
}

std::vector<double> default_alpha_grid() { return parse_alpha_grid("0.05:0.60:0.01"); }

double calibrate_alpha(const PowerCurve& curve, double h1, double h2,
                       const std::vector<double>& wind_at_h1,
                       const std::vector<double>& observed_kw,
                       const std::vector<double>& alpha_grid) {
    if (wind_at_h1.size() != observed_kw.size())
        throw LengthMismatch(fmt::format("{} wind values vs {} power values", wind_at_h1.size(),
                                         observed_kw.size()));
    if (wind_at_h1.empty()) throw EmptyInput("no calibration data");
    if (alpha_grid.empty()) throw EmptyInput("empty alpha grid");
    std::vector<double> grid = alpha_grid;
    std::sort(grid.begin(), grid.end());
    double best_alpha = grid.front();
    double best_error = std::numeric_limits<double>::infinity();
    for (double a : grid) {
        const auto forecast = wp_forecast(curve, WindSiteConfig(h1, h2, a), wind_at_h1);
        double err = 0.0;
        for (std::size_t i = 0; i < forecast.size(); ++i) err += std::abs(forecast[i] - observed_kw[i]);
        if (err < best_error) {
            best_error = err;
            best_alpha = a;
        }
    }
    return best_alpha;
}

std::size_t PVFleetTemplate::plant_index(const std::string& plant_id) const {
    const auto it = std::find(plant_ids.begin(), plant_ids.end(), plant_id);
    if (it == plant_ids.end()) throw UnknownPlant(fmt::format("unknown plant '{}'", plant_id));
    return static_cast<std::size_t>(it - plant_ids.begin());
}

std::vector<double> PVFleetTemplate::average_profile() const {
    return {average.begin(), average.end()};
}

nlohmann::json PVFleetTemplate::to_json() const {
    auto plants = nlohmann::json::array();
    for (std::size_t i = 0; i < plant_ids.size(); ++i)
        plants.push_back({{"plant_id", plant_ids[i]},
                          {"peak_kw", peak_kw[i]},
                          {"calibration_factor", calibration[i]}});
    // the long double tail, so a reloaded template still retransforms exactly
    std::vector<double> residual(average.size());
    for (std::size_t t = 0; t < average.size(); ++t)
        residual[t] = static_cast<double>(average[t] - static_cast<double>(average[t]));
    return {{"plants", plants}, {"average_profile", average_profile()}, {"average_residual", residual}};
}

PVFleetTemplate PVFleetTemplate::from_json(const nlohmann::json& j) {
    PVFleetTemplate t;
    try {
        for (const auto& p : j.at("plants")) {
            t.plant_ids.push_back(p.at("plant_id").get<std::string>());
            t.peak_kw.push_back(p.at("peak_kw").get<double>());
            t.calibration.push_back(p.value("calibration_factor", 1.0));
        }
        for (const auto& v : j.at("average_profile")) t.average.push_back(v.get<double>());
        if (j.contains("average_residual")) {
            const auto& r = j.at("average_residual");
            if (r.size() != t.average.size()) throw ParseError("PV template: residual length differs");
            for (std::size_t i = 0; i < r.size(); ++i) t.average[i] += r[i].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("PV template: ") + e.what());
    }
    for (std::size_t i = 0; i < t.peak_kw.size(); ++i)
        if (!(t.peak_kw[i] > 0.0) || !(t.calibration[i] > 0.0))
            throw ParseError(fmt::format("plant '{}' needs positive peak and calibration", t.plant_ids[i]));
    return t;
}

PVFleetTemplate pv_build_template(const std::vector<std::vector<double>>& profiles_kw,
                                  const std::vector<double>& peaks_kw,
                                  std::vector<std::string> plant_ids) {
    if (profiles_kw.empty()) throw EmptyInput("no PV profiles");
    if (peaks_kw.size() != profiles_kw.size())
        throw MisalignedSeries(fmt::format("{} profiles but {} peaks", profiles_kw.size(), peaks_kw.size()));
    if (plant_ids.empty())
        for (std::size_t i = 0; i < profiles_kw.size(); ++i) plant_ids.push_back(fmt::format("plant_{}", i));
    if (plant_ids.size() != profiles_kw.size())
        throw MisalignedSeries(fmt::format("{} profiles but {} plant ids", profiles_kw.size(), plant_ids.size()));
    const auto len = profiles_kw.front().size();
    for (std::size_t i = 0; i < profiles_kw.size(); ++i) {
        if (profiles_kw[i].size() != len)
            throw MisalignedSeries(fmt::format("profile of '{}' has {} steps, expected {}", plant_ids[i],
                                               profiles_kw[i].size(), len));
        if (!(peaks_kw[i] > 0.0))
            throw NonPositiveNormalizer(fmt::format("peak of '{}' must be positive", plant_ids[i]));
    }

    PVFleetTemplate t;
    t.plant_ids = std::move(plant_ids);
    t.peak_kw = peaks_kw;
    t.calibration.assign(profiles_kw.size(), 1.0);
    t.average.resize(len);
    const auto k = static_cast<long double>(profiles_kw.size());
    for (std::size_t s = 0; s < len; ++s) {
        // deviations from the first plant, so identical plants average exactly
        const long double first = static_cast<long double>(profiles_kw[0][s]) / peaks_kw[0];
        long double dev = 0.0L;
        for (std::size_t i = 1; i < profiles_kw.size(); ++i)
            dev += static_cast<long double>(profiles_kw[i][s]) / peaks_kw[i] - first;
        t.average[s] = first + dev / k;
    }
    return t;
}

double pv_calibrate(PVFleetTemplate& fleet, const std::string& plant_id,
                    const std::vector<double>& observed_kw,
                    const std::vector<double>& predicted_normalized) {
    const auto p = fleet.plant_index(plant_id);
    if (observed_kw.size() != predicted_normalized.size())
        throw LengthMismatch(fmt::format("{} observations vs {} predictions", observed_kw.size(),
                                         predicted_normalized.size()));
    const double peak = fleet.peak_kw[p];

    // sum_t |c*a_t - o_t| = const + sum_t |a_t| * |c - o_t/a_t|: a weighted median problem
    struct Breakpoint {
        double at;
        double weight;
    };
    std::vector<Breakpoint> bps;
    for (std::size_t t = 0; t < observed_kw.size(); ++t) {
        const double a = peak * predicted_normalized[t];
        if (a != 0.0) bps.push_back({observed_kw[t] / a, std::abs(a)});
    }
    if (bps.empty()) throw DegeneratePrediction("every predicted value is zero");
    std::sort(bps.begin(), bps.end(), [](const Breakpoint& x, const Breakpoint& y) { return x.at < y.at; });

    const auto n = bps.size();
    std::vector<double> w_prefix(n + 1, 0.0);
    std::vector<double> wb_prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w_prefix[i + 1] = w_prefix[i] + bps[i].weight;
        wb_prefix[i + 1] = wb_prefix[i] + bps[i].weight * bps[i].at;
    }
    std::vector<double> objective(n);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = bps[i].at;
        const double left = c * w_prefix[i + 1] - wb_prefix[i + 1];
        const double right = (wb_prefix[n] - wb_prefix[i + 1]) - c * (w_prefix[n] - w_prefix[i + 1]);
        objective[i] = left + right;
        lowest = std::min(lowest, objective[i]);
    }

    // the prefix form is only accurate to rounding; settle near-ties on the direct sum
    auto direct = [&](double c) {
        double s = 0.0;
        for (std::size_t t = 0; t < observed_kw.size(); ++t)
            s += std::abs(c * peak * predicted_normalized[t] - observed_kw[t]);
        return s;
    };
    const double slack = 1e-9 * (std::abs(lowest) + w_prefix[n] * std::abs(bps[n / 2].at)) + 1e-300;
    double best_c = 0.0;
    double best_direct = std::numeric_limits<double>::infinity();
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i) {
        if (objective[i] > lowest + slack || bps[i].at == previous) continue;
        previous = bps[i].at;
        const double d = direct(bps[i].at);
        if (d < best_direct) {
            best_direct = d;
            best_c = bps[i].at;
        }
    }
    // breakpoints carry division rounding; polish over neighbouring doubles and break
    // exact ties toward the shortest decimal
    auto digits = [](double c) {
        char buf[32];
        return std::to_chars(buf, buf + sizeof buf, c).ptr - buf;
    };
    const double centre = best_c;
    for (const double toward : {std::numeric_limits<double>::infinity(), 0.0}) {
        double c = centre;
        for (int step = 0; step < 16; ++step) {
            c = std::nextafter(c, toward);
            const double d = direct(c);
            if (d < best_direct || (d == best_direct && digits(c) < digits(best_c))) {
                best_direct = d;
                best_c = c;
            }
        }
    }
    if (!(best_c > 0.0))
        throw DegeneratePrediction(fmt::format("calibration factor for '{}' would be {}", plant_id, best_c));
    fleet.calibration[p] = best_c;
    return best_c;
}

std::vector<double> pv_forecast(const PVFleetTemplate& fleet, const std::string& plant_id,
                                const std::vector<double>& predicted_normalized) {
    const auto p = fleet.plant_index(plant_id);
    std::vector<double> out(predicted_normalized.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = std::max(0.0, fleet.calibration[p] * fleet.peak_kw[p] * predicted_normalized[t]);
    return out;
}

std::vector<double> pv_forecast(const PVFleetTemplate& fleet, const std::string& plant_id) {
    const auto p = fleet.plant_index(plant_id);
    const long double scale = static_cast<long double>(fleet.calibration[p]) * fleet.peak_kw[p];
    std::vector<double> out(fleet.average.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = std::max(0.0, static_cast<double>(scale * fleet.average[t]));
    return out;
}

std::vector<bool> twin_anomaly_flags(const std::vector<double>& a_kw,
                                     const std::vector<double>& b_kw, double rated_kw,
                                     double threshold, int min_run) {
    if (a_kw.size() != b_kw.size())
        throw LengthMismatch(fmt::format("twin series have {} and {} steps", a_kw.size(), b_kw.size()));
    if (!(rated_kw > 0.0)) throw NonPositiveNormalizer("rated power must be positive");
    const auto n = a_kw.size();
    std::vector<bool> flags(n, false);
    std::size_t run_start = 0;
    for (std::size_t t = 0; t <= n; ++t) {
        const bool deviating = t < n && std::abs(a_kw[t] - b_kw[t]) / rated_kw > threshold;
        if (deviating) continue;
        if (t - run_start >= static_cast<std::size_t>(std::max(min_run, 1)))
            std::fill(flags.begin() + static_cast<std::ptrdiff_t>(run_start),
                      flags.begin() + static_cast<std::ptrdiff_t>(t), true);
        run_start = t + 1;
    }
    return flags;
}

} // namespace autohybrid
