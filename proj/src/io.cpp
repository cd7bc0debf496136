#include "autohybrid/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "autohybrid/error.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        cells.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return cells;
}

bool parse_number(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

double number_at(const CsvTable& t, std::size_t row, std::size_t col) {
    double v = 0.0;
    if (!parse_number(t.rows[row][col], v)) throw NonNumericCell(row + 1, t.header[col], t.rows[row][col]);
    return v;
}

std::size_t column_index(const CsvTable& t, const std::string& name, const std::filesystem::path& path) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == name) return c;
    throw ParseError(fmt::format("{}: missing column '{}'", path.string(), name));
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
    CsvTable t;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(fmt::format("{}:{}: {} cells, header has {}", path.string(), line_no,
                                         cells.size(), t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw EmptyFile(fmt::format("{} is empty", path.string()));
    return t;
}

Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& target) {
    const auto t = read_csv(path);
    std::size_t target_col = t.header.size();
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == target) target_col = c;
    if (target_col == t.header.size())
        throw MissingTarget(fmt::format("{}: no column named '{}'", path.string(), target));
    if (t.rows.empty()) throw EmptyFile(fmt::format("{} has a header but no rows", path.string()));

    const auto n = static_cast<Eigen::Index>(t.rows.size());
    const auto d = static_cast<Eigen::Index>(t.header.size()) - 1;
    Dataset data;
    data.id = path.stem().string();
    data.features.resize(n, d);
    data.target.resize(n);
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (c != target_col) data.feature_names.push_back(t.header[c]);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Eigen::Index j = 0;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            const double v = number_at(t, r, c);
            if (c == target_col)
                data.target(static_cast<Eigen::Index>(r)) = v;
            else
                data.features(static_cast<Eigen::Index>(r), j++) = v;
        }
    }
    data.target = min_max_normalize(data.target);
    return data;
}

void write_csv_dataset(const std::filesystem::path& path, const Dataset& data,
                       const std::string& target_name) {
    std::ostringstream out;
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const auto idx = static_cast<std::size_t>(j);
        out << (idx < data.feature_names.size() ? data.feature_names[idx] : fmt::format("x{}", j + 1))
            << ',';
    }
    out << target_name << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) out << fmt::format("{},", data.features(i, j));
        out << fmt::format("{}\n", data.target(i));
    }
    write_text(path, out.str());
}

PowerCurve load_power_curve(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto vc = column_index(t, "wind_speed_ms", path);
    const auto pc = column_index(t, "power_kw", path);
    std::vector<double> speeds;
    std::vector<double> power;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        speeds.push_back(number_at(t, r, vc));
        power.push_back(number_at(t, r, pc));
    }
    return PowerCurve(std::move(speeds), std::move(power));
}

TimeSeries load_time_series(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto tc = column_index(t, "timestamp", path);
    const auto vc = column_index(t, "value", path);
    TimeSeries s;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        s.timestamps.push_back(t.rows[r][tc]);
        s.values.push_back(number_at(t, r, vc));
    }
    return s;
}

void write_time_series(const std::filesystem::path& path, const TimeSeries& series) {
    if (series.timestamps.size() != series.values.size())
        throw MisalignedSeries("timestamps and values differ in length");
    std::string out = "timestamp,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i)
        out += fmt::format("{},{}\n", series.timestamps[i], series.values[i]);
    write_text(path, out);
}

void check_aligned(const TimeSeries& a, const TimeSeries& b) {
    if (a.timestamps.size() != b.timestamps.size())
        throw MisalignedSeries(fmt::format("series have {} and {} steps", a.timestamps.size(),
                                           b.timestamps.size()));
    for (std::size_t i = 0; i < a.timestamps.size(); ++i)
        if (a.timestamps[i] != b.timestamps[i])
            throw MisalignedSeries(fmt::format("timestamps differ at step {}: {} vs {}", i + 1,
                                               a.timestamps[i], b.timestamps[i]));
}

std::vector<PlantRecord> load_plant_registry(const std::filesystem::path& path) {
    std::vector<PlantRecord> plants;
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        for (const auto& p : j) {
            PlantRecord rec;
            rec.plant_id = p.at("plant_id").get<std::string>();
            rec.peak_kw = p.at("peak_kw").get<double>();
            rec.calibration_factor = p.value("calibration_factor", 1.0);
            if (!(rec.peak_kw > 0.0) || !(rec.calibration_factor > 0.0))
                throw ParseError(fmt::format("plant '{}' needs positive peak_kw and calibration_factor",
                                             rec.plant_id));
            plants.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return plants;
}

void write_plant_registry(const std::filesystem::path& path, const std::vector<PlantRecord>& plants) {
    auto j = nlohmann::json::array();
    for (const auto& p : plants)
        j.push_back({{"plant_id", p.plant_id},
                     {"peak_kw", p.peak_kw},
                     {"calibration_factor", p.calibration_factor}});
    write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(fmt::format("cannot write {}", path.string()));
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Dataset synthetic_friedman(Eigen::Index rows, Eigen::Index features, std::uint64_t seed, double noise) {
    if (features < 5) throw InvalidDataset("the Friedman response needs at least 5 features");
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> eps(0.0, noise);
    Dataset data;
    data.id = fmt::format("friedman_{}", seed);
    data.features.resize(rows, features);
    data.target.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < features; ++j) data.features(i, j) = u(rng);
        const auto x = data.features.row(i);
        data.target(i) = 10.0 * std::sin(M_PI * x(0) * x(1)) + 20.0 * (x(2) - 0.5) * (x(2) - 0.5) +
                         10.0 * x(3) + 5.0 * x(4) + eps(rng);
    }
    for (Eigen::Index j = 0; j < features; ++j) data.feature_names.push_back(fmt::format("x{}", j + 1));
    return data;
}

Vector sine_linear_response(const Matrix& X) {
    Vector y = Vector::Zero(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double x = X(i, j);
            y(i) += x + (std::abs(x) <= 1.0 ? 0.5 * (std::cos(M_PI * x) + std::cos(2.0 * M_PI * x)) : 0.0);
        }
    return y;
}

Dataset synthetic_sine_linear(Eigen::Index rows, Eigen::Index features, std::uint64_t seed, double noise) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> eps(0.0, noise);
    Dataset data;
    data.id = fmt::format("sine_linear_{}", seed);
    data.features.resize(rows, features);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < features; ++j) data.features(i, j) = u(rng);
    data.target = sine_linear_response(data.features);
    if (noise > 0.0)
        for (Eigen::Index i = 0; i < rows; ++i) data.target(i) += eps(rng);
    for (Eigen::Index j = 0; j < features; ++j) data.feature_names.push_back(fmt::format("x{}", j + 1));
    return data;
}

} // namespace autohybrid
