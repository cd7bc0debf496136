#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "autohybrid/dataset.hpp"
#include "autohybrid/renewables.hpp"

namespace autohybrid {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Plain comma-separated file with a header line; blank lines are skipped.
/// Throws EmptyFile, ParseError.
CsvTable read_csv(const std::filesystem::path& path);

/// Features are all columns except `target`; the target is min-max normalized to [0, 1]
/// over the whole file. Throws MissingTarget, NonNumericCell, EmptyFile.
Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& target);
/// Features followed by a target column named `target_name`.
void write_csv_dataset(const std::filesystem::path& path, const Dataset& data,
                       const std::string& target_name = "y");

/// Header `wind_speed_ms,power_kw`, ascending speeds.
PowerCurve load_power_curve(const std::filesystem::path& path);

/// Header `timestamp,value`; timestamps are kept verbatim (ISO-8601 UTC).
struct TimeSeries {
    std::vector<std::string> timestamps;
    std::vector<double> values;
};
TimeSeries load_time_series(const std::filesystem::path& path);
void write_time_series(const std::filesystem::path& path, const TimeSeries& series);
/// Throws MisalignedSeries when the timestamps differ.
void check_aligned(const TimeSeries& a, const TimeSeries& b);

struct PlantRecord {
    std::string plant_id;
    double peak_kw = 0.0;
    double calibration_factor = 1.0;
};
/// JSON array of {plant_id, peak_kw, calibration_factor}.
std::vector<PlantRecord> load_plant_registry(const std::filesystem::path& path);
void write_plant_registry(const std::filesystem::path& path, const std::vector<PlantRecord>& plants);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Synthetic data so tests and demos need no downloads.

/// Friedman-style nonlinear response on U[0,1]^d (d >= 5) with Gaussian noise.
Dataset synthetic_friedman(Eigen::Index rows, Eigen::Index features, std::uint64_t seed,
                           double noise = 0.5);
/// Each feature contributes x + (cos(pi x) + cos(2 pi x)) / 2 on [-1, 1] and x outside, so
/// the response is wavy inside the training box and linear beyond it. The wave has zero mean
/// and is even, so a least-squares line through the box is y = x. Rows are drawn on
/// [-1, 1]^d.
Dataset synthetic_sine_linear(Eigen::Index rows, Eigen::Index features, std::uint64_t seed,
                              double noise = 0.02);
Vector sine_linear_response(const Matrix& X);

} // namespace autohybrid
