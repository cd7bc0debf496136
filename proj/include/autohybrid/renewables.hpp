#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace autohybrid {

/// Turbine power curve: linear interpolation over an ascending speed table,
/// zero below cut-in and at or above cut-out, clamped to [0, rated].
class PowerCurve {
public:
    /// Cut-in defaults to the last zero-power speed before the ramp, cut-out to the
    /// last table speed, rated to the table maximum. Throws InvalidCurve.
    PowerCurve(std::vector<double> speeds_ms, std::vector<double> power_kw,
               std::optional<double> cut_in = std::nullopt,
               std::optional<double> cut_out = std::nullopt,
               std::optional<double> rated_kw = std::nullopt);

    double operator()(double v_hub) const;

    const std::vector<double>& speeds() const noexcept { return speeds_; }
    const std::vector<double>& powers() const noexcept { return powers_; }
    double cut_in() const noexcept { return cut_in_; }
    double cut_out() const noexcept { return cut_out_; }
    double rated() const noexcept { return rated_; }

private:
    std::vector<double> speeds_;
    std::vector<double> powers_;
    double cut_in_ = 0.0;
    double cut_out_ = 0.0;
    double rated_ = 0.0;
};

struct WindSiteConfig {
    double h1;      // measurement height, m
    double h2;      // hub height, m
    double alpha;

    /// Throws InvalidConfig.
    WindSiteConfig(double h1_m, double h2_m, double alpha);
};

/// Wind profile power law: v1 * (h2 / h1)^alpha.
double height_correct(double v1, const WindSiteConfig& cfg);
double power_curve_eval(const PowerCurve& curve, double v_hub);
std::vector<double> wp_forecast(const PowerCurve& curve, const WindSiteConfig& cfg,
                                const std::vector<double>& wind_at_h1);

/// "lo:hi:step", both ends inclusive. Throws ParseError.
std::vector<double> parse_alpha_grid(const std::string& text);
std::vector<double> default_alpha_grid();

/// The grid value minimizing forecast MAE against observed power; ties go to the
/// smallest alpha. Throws LengthMismatch, EmptyInput.
double calibrate_alpha(const PowerCurve& curve, double h1, double h2,
                       const std::vector<double>& wind_at_h1,
                       const std::vector<double>& observed_kw,
                       const std::vector<double>& alpha_grid);

/// Fleet-wide PV template: the average peak-normalized profile plus a peak and a
/// calibration factor per plant.
struct PVFleetTemplate {
    std::vector<std::string> plant_ids;
    std::vector<double> peak_kw;
    std::vector<double> calibration;
    /// Long double; retransforming identical plants reproduces them bit for bit.
    std::vector<long double> average;

    std::size_t plant_index(const std::string& plant_id) const;  // throws UnknownPlant
    std::vector<double> average_profile() const;

    nlohmann::json to_json() const;
    static PVFleetTemplate from_json(const nlohmann::json& j);
};

/// Throws MisalignedSeries, NonPositiveNormalizer, EmptyInput.
PVFleetTemplate pv_build_template(const std::vector<std::vector<double>>& profiles_kw,
                                  const std::vector<double>& peaks_kw,
                                  std::vector<std::string> plant_ids = {});

/// Sets the plant's calibration factor to the minimizer of
/// MAE(c * peak * predicted_normalized, observed) and returns it.
/// Throws UnknownPlant, LengthMismatch, DegeneratePrediction.
double pv_calibrate(PVFleetTemplate& fleet, const std::string& plant_id,
                    const std::vector<double>& observed_kw,
                    const std::vector<double>& predicted_normalized);

/// c * peak * predicted_normalized, clamped at zero. Throws UnknownPlant.
std::vector<double> pv_forecast(const PVFleetTemplate& fleet, const std::string& plant_id,
                                const std::vector<double>& predicted_normalized);
std::vector<double> pv_forecast(const PVFleetTemplate& fleet, const std::string& plant_id);

inline constexpr double kTwinThreshold = 0.5;
inline constexpr int kTwinMinRun = 3;

/// Flags steps where |a - b| / rated exceeds `threshold` for at least `min_run`
/// consecutive steps. Throws LengthMismatch, NonPositiveNormalizer.
std::vector<bool> twin_anomaly_flags(const std::vector<double>& a_kw,
                                     const std::vector<double>& b_kw, double rated_kw,
                                     double threshold = kTwinThreshold, int min_run = kTwinMinRun);

} // namespace autohybrid
