#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "autohybrid/benchmark.hpp"
#include "autohybrid/error.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/grid_search.hpp"
#include "autohybrid/hybrid_tpe.hpp"
#include "autohybrid/io.hpp"
#include "autohybrid/log.hpp"
#include "autohybrid/parallel.hpp"
#include "autohybrid/renewables.hpp"

namespace fs = std::filesystem;
using namespace autohybrid;

namespace {

struct Options {
    int jobs = 0;
    bool verbose = false;
    bool quiet = false;

    fs::path config;
    fs::path data;
    std::string target = "y";
    std::string method = "grid";
    int trials = 500;
    std::uint64_t seed = 0;
    fs::path out;
    std::string grid = "default";
    bool early_stop = false;

    fs::path curve;
    fs::path wind;
    fs::path power;
    fs::path site;
    double h1 = 10.0;
    double h2 = 100.0;
    double alpha = 1.0 / 7.0;
    std::string alpha_grid = "0.05:0.60:0.01";

    fs::path registry;
    fs::path template_path;
    std::string plant;
    fs::path observed;
    fs::path predicted;

    fs::path series_a;
    fs::path series_b;
    double rated = 0.0;
    double threshold = kTwinThreshold;
    int min_run = kTwinMinRun;

    std::string kind = "friedman";
    long rows = 500;
    long features = 5;
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_bench(const Options& o) {
    auto cfg = load_experiment_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    const auto outcome = run_benchmark(cfg, resolve_jobs(o.jobs));
    for (const auto& e : outcome.errors) log_warning(e);
    std::cout << fmt::format("{} cells done, {} failed; results in {}\n", outcome.cells.size(),
                             outcome.errors.size(), cfg.output_dir.string());
    return outcome.exit_code;
}

int cmd_tune(const Options& o) {
    const auto data = load_csv_dataset(o.data, o.target);
    const auto split = make_split(data.rows(), o.seed);
    const fs::path out = o.out.empty() ? fs::path("tune_out") : o.out;
    const int jobs = resolve_jobs(o.jobs);
    nlohmann::json report;
    nlohmann::json model;
    if (o.method == "grid") {
        const auto res = grid_search_hybrid(data, experiment_grid(o.grid, o.seed), split, PoolOptions{jobs});
        report = res.report.to_json();
        model = res.model.to_json();
    } else if (o.method == "tpe" || o.method == "random") {
        HybridTpeOptions opts;
        opts.random_search = o.method == "random";
        opts.settings.n_trials = o.trials;
        opts.settings.seed = o.seed;
        if (o.early_stop) opts.settings.early_stop = EarlyStopping{};
        opts.threads = jobs;
        const auto res = tpe_search_hybrid(data, split, opts);
        report = res.report.to_json();
        model = res.model.to_json();
        std::ostringstream trace;
        write_trace_csv(trace, res.tpe);
        write_text(out / "trace.csv", trace.str());
    } else {
        throw InvalidConfig(fmt::format("unknown method '{}' (grid, tpe or random)", o.method));
    }
    write_text(out / "report.json", report.dump(2) + "\n");
    write_text(out / "model.json", model.dump() + "\n");
    print_json(report);
    return 0;
}

WindSiteConfig site_from(const Options& o) {
    if (o.site.empty()) return WindSiteConfig(o.h1, o.h2, o.alpha);
    const auto j = nlohmann::json::parse(read_text(o.site));
    return WindSiteConfig(j.at("h1").get<double>(), j.at("h2").get<double>(), j.at("alpha").get<double>());
}

int cmd_wp_calibrate(const Options& o) {
    const auto curve = load_power_curve(o.curve);
    const auto wind = load_time_series(o.wind);
    const auto power = load_time_series(o.power);
    check_aligned(wind, power);
    const double alpha = calibrate_alpha(curve, o.h1, o.h2, wind.values, power.values,
                                         parse_alpha_grid(o.alpha_grid));
    const auto forecast = wp_forecast(curve, WindSiteConfig(o.h1, o.h2, alpha), wind.values);
    const nlohmann::json site = {{"h1", o.h1},
                                 {"h2", o.h2},
                                 {"alpha", alpha},
                                 {"nmae", nmae(forecast, power.values, curve.rated())}};
    if (!o.out.empty()) write_text(o.out, site.dump(2) + "\n");
    print_json(site);
    return 0;
}

int cmd_wp_forecast(const Options& o) {
    const auto curve = load_power_curve(o.curve);
    const auto wind = load_time_series(o.wind);
    const TimeSeries out{wind.timestamps, wp_forecast(curve, site_from(o), wind.values)};
    if (o.out.empty()) {
        for (std::size_t i = 0; i < out.values.size(); ++i)
            std::cout << fmt::format("{},{}\n", out.timestamps[i], out.values[i]);
    } else {
        write_time_series(o.out, out);
    }
    return 0;
}

nlohmann::json template_json(const PVFleetTemplate& t, const std::vector<std::string>& timestamps) {
    auto j = t.to_json();
    j["timestamps"] = timestamps;
    return j;
}

std::vector<std::string> template_timestamps(const nlohmann::json& j) {
    return j.value("timestamps", std::vector<std::string>{});
}

int cmd_pv_build(const Options& o) {
    const auto plants = load_plant_registry(o.registry);
    std::vector<std::vector<double>> profiles;
    std::vector<double> peaks;
    std::vector<std::string> ids;
    std::optional<TimeSeries> first;
    for (const auto& p : plants) {
        const auto series = load_time_series(o.data / (p.plant_id + ".csv"));
        if (first) check_aligned(*first, series);
        else first = series;
        profiles.push_back(series.values);
        peaks.push_back(p.peak_kw);
        ids.push_back(p.plant_id);
    }
    if (!first) throw EmptyInput("the plant registry is empty");
    auto t = pv_build_template(profiles, peaks, ids);
    for (std::size_t i = 0; i < plants.size(); ++i) t.calibration[i] = plants[i].calibration_factor;
    const fs::path out = o.out.empty() ? fs::path("pv_template.json") : o.out;
    write_text(out, template_json(t, first->timestamps).dump(2) + "\n");
    std::cout << fmt::format("template over {} plants and {} steps written to {}\n", ids.size(),
                             t.average.size(), out.string());
    return 0;
}

int cmd_pv_calibrate(const Options& o) {
    const auto j = nlohmann::json::parse(read_text(o.template_path));
    auto t = PVFleetTemplate::from_json(j);
    const auto observed = load_time_series(o.observed);
    std::vector<double> predicted = t.average_profile();
    if (!o.predicted.empty()) {
        const auto p = load_time_series(o.predicted);
        check_aligned(observed, p);
        predicted = p.values;
    }
    const double c = pv_calibrate(t, o.plant, observed.values, predicted);
    const auto forecast = pv_forecast(t, o.plant, predicted);
    const double err = nmae(forecast, observed.values, t.peak_kw[t.plant_index(o.plant)]);
    write_text(o.out.empty() ? o.template_path : o.out, template_json(t, template_timestamps(j)).dump(2) + "\n");
    print_json({{"plant_id", o.plant}, {"calibration_factor", c}, {"nmae", err}});
    return 0;
}

int cmd_pv_forecast(const Options& o) {
    const auto j = nlohmann::json::parse(read_text(o.template_path));
    const auto t = PVFleetTemplate::from_json(j);
    TimeSeries out;
    if (o.predicted.empty()) {
        out.values = pv_forecast(t, o.plant);
        out.timestamps = template_timestamps(j);
        if (out.timestamps.size() != out.values.size())
            for (std::size_t i = out.timestamps.size(); i < out.values.size(); ++i)
                out.timestamps.push_back(std::to_string(i));
    } else {
        const auto p = load_time_series(o.predicted);
        out.timestamps = p.timestamps;
        out.values = pv_forecast(t, o.plant, p.values);
    }
    if (o.out.empty()) {
        for (std::size_t i = 0; i < out.values.size(); ++i)
            std::cout << fmt::format("{},{}\n", out.timestamps[i], out.values[i]);
    } else {
        write_time_series(o.out, out);
    }
    return 0;
}

int cmd_anomaly_twins(const Options& o) {
    const auto a = load_time_series(o.series_a);
    const auto b = load_time_series(o.series_b);
    check_aligned(a, b);
    const auto flags = twin_anomaly_flags(a.values, b.values, o.rated, o.threshold, o.min_run);
    std::string csv = "timestamp,flag\n";
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        csv += fmt::format("{},{}\n", a.timestamps[i], flags[i] ? 1 : 0);
        flagged += flags[i] ? 1 : 0;
    }
    if (o.out.empty()) std::cout << csv;
    else write_text(o.out, csv);
    std::cerr << fmt::format("{} of {} steps flagged\n", flagged, flags.size());
    return 0;
}

int cmd_report(const Options& o) {
    const fs::path dir = o.out.empty() ? fs::path("results") : o.out;
    emit_report(load_results(dir), dir);
    std::cout << fmt::format("convergence.csv and summary.csv written to {}\n", dir.string());
    return 0;
}

int cmd_synth(const Options& o) {
    const auto data = o.kind == "friedman"      ? synthetic_friedman(o.rows, o.features, o.seed)
                      : o.kind == "sine_linear" ? synthetic_sine_linear(o.rows, o.features, o.seed)
                                                : throw InvalidConfig("kind must be friedman or sine_linear");
    const fs::path out = o.out.empty() ? fs::path(data.id + ".csv") : o.out;
    write_csv_dataset(out, data, o.target);
    std::cout << fmt::format("{} rows written to {}\n", data.rows(), out.string());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Automated design of hybrid interpolation/extrapolation regressors"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--jobs", o.jobs, "Worker threads (default: AUTOHYBRID_JOBS or 1)");
    app.add_flag("-v,--verbose", o.verbose, "Progress messages on stderr");
    app.add_flag("-q,--quiet", o.quiet, "Suppress warnings");

    std::function<int()> action;

    auto* bench = app.add_subcommand("bench", "Run a grid-vs-TPE benchmark");
    bench->add_option("--config", o.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", o.out, "Output directory (overrides the config)");
    bench->callback([&] { action = [&] { return cmd_bench(o); }; });

    auto* tune = app.add_subcommand("tune", "Design one hybrid model for a CSV dataset");
    tune->add_option("--data", o.data, "CSV dataset")->required()->check(CLI::ExistingFile);
    tune->add_option("--target", o.target, "Target column");
    tune->add_option("--method", o.method, "grid, tpe or random");
    tune->add_option("--trials", o.trials, "TPE trial budget");
    tune->add_option("--seed", o.seed, "Split and learner seed");
    tune->add_option("--grid", o.grid, "Grid name: default or micro");
    tune->add_flag("--early-stop", o.early_stop, "Enable TPE early stopping");
    tune->add_option("--out", o.out, "Output directory");
    tune->callback([&] { action = [&] { return cmd_tune(o); }; });

    auto* wp = app.add_subcommand("wp", "Wind power template");
    wp->require_subcommand(1);
    auto* wp_cal = wp->add_subcommand("calibrate", "Grid-search the friction coefficient");
    wp_cal->add_option("--curve", o.curve, "Power curve CSV")->required()->check(CLI::ExistingFile);
    wp_cal->add_option("--wind", o.wind, "Wind speed series at h1")->required()->check(CLI::ExistingFile);
    wp_cal->add_option("--power", o.power, "Observed power series")->required()->check(CLI::ExistingFile);
    wp_cal->add_option("--h1", o.h1, "Measurement height, m");
    wp_cal->add_option("--h2", o.h2, "Hub height, m");
    wp_cal->add_option("--alpha-grid", o.alpha_grid, "lo:hi:step");
    wp_cal->add_option("--out", o.out, "Site JSON to write");
    wp_cal->callback([&] { action = [&] { return cmd_wp_calibrate(o); }; });
    auto* wp_fc = wp->add_subcommand("forecast", "Power forecast from a wind series");
    wp_fc->add_option("--curve", o.curve, "Power curve CSV")->required()->check(CLI::ExistingFile);
    wp_fc->add_option("--wind", o.wind, "Wind speed series at h1")->required()->check(CLI::ExistingFile);
    wp_fc->add_option("--site", o.site, "Site JSON from wp calibrate");
    wp_fc->add_option("--h1", o.h1, "Measurement height, m");
    wp_fc->add_option("--h2", o.h2, "Hub height, m");
    wp_fc->add_option("--alpha", o.alpha, "Friction coefficient");
    wp_fc->add_option("--out", o.out, "Forecast CSV");
    wp_fc->callback([&] { action = [&] { return cmd_wp_forecast(o); }; });

    auto* pv = app.add_subcommand("pv", "Photovoltaic fleet template");
    pv->require_subcommand(1);
    auto* pv_build = pv->add_subcommand("build", "Average the peak-normalized plant profiles");
    pv_build->add_option("--config", o.registry, "Plant registry JSON")->required()->check(CLI::ExistingFile);
    pv_build->add_option("--data", o.data, "Directory with <plant_id>.csv series")->required();
    pv_build->add_option("--out", o.out, "Template JSON");
    pv_build->callback([&] { action = [&] { return cmd_pv_build(o); }; });
    auto* pv_cal = pv->add_subcommand("calibrate", "Fit one plant's calibration factor");
    pv_cal->add_option("--config", o.template_path, "Template JSON")->required()->check(CLI::ExistingFile);
    pv_cal->add_option("--plant", o.plant, "Plant id")->required();
    pv_cal->add_option("--data", o.observed, "Observed power series")->required()->check(CLI::ExistingFile);
    pv_cal->add_option("--predicted", o.predicted, "Normalized prediction series (default: template)");
    pv_cal->add_option("--out", o.out, "Updated template (default: in place)");
    pv_cal->callback([&] { action = [&] { return cmd_pv_calibrate(o); }; });
    auto* pv_fc = pv->add_subcommand("forecast", "Retransform a normalized profile to one plant");
    pv_fc->add_option("--config", o.template_path, "Template JSON")->required()->check(CLI::ExistingFile);
    pv_fc->add_option("--plant", o.plant, "Plant id")->required();
    pv_fc->add_option("--predicted", o.predicted, "Normalized prediction series (default: template)");
    pv_fc->add_option("--out", o.out, "Forecast CSV");
    pv_fc->callback([&] { action = [&] { return cmd_pv_forecast(o); }; });

    auto* anomaly = app.add_subcommand("anomaly", "Operational anomaly checks");
    anomaly->require_subcommand(1);
    auto* twins = anomaly->add_subcommand("twins", "Flag diverging outputs of twin turbines");
    twins->add_option("--a", o.series_a, "First turbine series")->required()->check(CLI::ExistingFile);
    twins->add_option("--b", o.series_b, "Second turbine series")->required()->check(CLI::ExistingFile);
    twins->add_option("--rated", o.rated, "Rated power, kW")->required();
    twins->add_option("--threshold", o.threshold, "Deviation as a fraction of rated power");
    twins->add_option("--min-run", o.min_run, "Minimum consecutive deviating steps");
    twins->add_option("--out", o.out, "Flag CSV");
    twins->callback([&] { action = [&] { return cmd_anomaly_twins(o); }; });

    auto* report = app.add_subcommand("report", "Aggregate benchmark results");
    report->add_option("--out", o.out, "Benchmark directory");
    report->callback([&] { action = [&] { return cmd_report(o); }; });

    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
    synth->add_option("--method", o.kind, "friedman or sine_linear");
    synth->add_option("--rows", o.rows, "Rows");
    synth->add_option("--features", o.features, "Features");
    synth->add_option("--seed", o.seed, "Seed");
    synth->add_option("--target", o.target, "Target column name");
    synth->add_option("--out", o.out, "CSV path");
    synth->callback([&] { action = [&] { return cmd_synth(o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    set_log_level(o.quiet ? LogLevel::quiet : o.verbose ? LogLevel::info : LogLevel::warning);
    try {
        return action();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
