#include "autohybrid/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/grid_search.hpp"
#include "autohybrid/hybrid_tpe.hpp"
#include "autohybrid/io.hpp"
#include "autohybrid/log.hpp"
#include "autohybrid/parallel.hpp"

namespace autohybrid {

void ExperimentConfig::check() const {
    if (datasets.empty()) throw InvalidConfig("the experiment lists no datasets");
    if (methods.empty()) throw InvalidConfig("the experiment lists no methods");
    if (seeds.empty()) throw InvalidConfig("the experiment lists no seeds");
    for (const auto& m : methods)
        if (m != "grid" && m != "tpe") throw InvalidConfig(fmt::format("unknown method '{}'", m));
    for (const auto& d : datasets)
        if (d.target.empty()) throw InvalidConfig(fmt::format("{}: no target column", d.path.string()));
    tpe.check();
    experiment_grid(grid, 0);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    try {
        for (const auto& d : j.at("datasets")) {
            std::filesystem::path p = d.at("path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            cfg.datasets.push_back({p, d.value("target", std::string("y"))});
        }
        cfg.methods = j.value("methods", std::vector<std::string>{"grid", "tpe"});
        if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("tpe")) {
            const auto& t = j.at("tpe");
            cfg.tpe.n_trials = t.value("n_trials", cfg.tpe.n_trials);
            cfg.tpe.gamma = t.value("gamma", cfg.tpe.gamma);
            cfg.tpe.n_startup = t.value("n_startup", cfg.tpe.n_startup);
            cfg.tpe.n_candidates = t.value("n_candidates", cfg.tpe.n_candidates);
            if (t.contains("early_stop") && !t.at("early_stop").is_null()) {
                EarlyStopping es;
                es.patience = t.at("early_stop").value("patience", es.patience);
                es.min_rel_improvement = t.at("early_stop").value("min_rel_improvement", es.min_rel_improvement);
                cfg.tpe.early_stop = es;
            }
        }
        if (j.contains("grid")) cfg.grid = j.at("grid");
        std::filesystem::path out = j.value("output_dir", std::string("results"));
        if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
        cfg.output_dir = out;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(fmt::format("experiment config: {}", e.what()));
    }
    cfg.check();
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    auto ds = nlohmann::json::array();
    for (const auto& d : datasets) ds.push_back({{"path", d.path.string()}, {"target", d.target}});
    nlohmann::json tpe_json = {{"n_trials", tpe.n_trials},
                               {"gamma", tpe.gamma},
                               {"n_startup", tpe.n_startup},
                               {"n_candidates", tpe.n_candidates},
                               {"early_stop", nullptr}};
    if (tpe.early_stop)
        tpe_json["early_stop"] = {{"patience", tpe.early_stop->patience},
                                  {"min_rel_improvement", tpe.early_stop->min_rel_improvement}};
    return {{"datasets", ds},       {"methods", methods}, {"seeds", seeds},
            {"tpe", tpe_json},      {"grid", grid},       {"output_dir", output_dir.string()}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(fmt::format("{}: {}", path.string(), e.what()));
    }
    return ExperimentConfig::from_json(j, path.parent_path());
}

HybridGrid micro_hybrid_grid(std::uint64_t seed) {
    HybridGrid g;
    g.predictors = {LearnerSpec::mlp(3, seed), LearnerSpec::mlp(10, seed),
                    LearnerSpec::svr(0.3, kSvrC, kSvrEpsilon, seed),
                    LearnerSpec::svr(1.0, kSvrC, kSvrEpsilon, seed), LearnerSpec::linear(seed)};
    g.deciders = {DeciderSpec{0.5, kDefaultNu}, DeciderSpec{1.5, kDefaultNu}};
    return g;
}

HybridGrid experiment_grid(const nlohmann::json& grid, std::uint64_t seed) {
    if (grid.is_string()) {
        const auto name = grid.get<std::string>();
        if (name == "default") return default_hybrid_grid(seed);
        if (name == "micro") return micro_hybrid_grid(seed);
        throw InvalidConfig(fmt::format("unknown grid '{}'", name));
    }
    try {
        HybridGrid g;
        for (const auto& cfg : enumerate_grid(space_from_json(grid.at("predictor_space"))))
            g.predictors.push_back(learner_from_grid_config(cfg, seed));
        for (double s : grid.at("decider_sigmas").get<std::vector<double>>())
            g.deciders.push_back(DeciderSpec{s, grid.value("nu", kDefaultNu)});
        if (g.predictors.empty() || g.deciders.empty()) throw InvalidConfig("the grid is empty");
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(fmt::format("grid definition: {}", e.what()));
    } catch (const Error& e) {
        throw InvalidConfig(fmt::format("grid definition: {}", e.what()));
    }
}

namespace {

using Clock = std::chrono::steady_clock;

struct Cell {
    std::size_t dataset = 0;
    std::uint64_t seed = 0;
    std::string method;
};

CellResult run_cell(const Dataset& data, const Cell& cell, const ExperimentConfig& cfg) {
    const auto start = Clock::now();
    const auto split = make_split(data.rows(), cell.seed);
    CellResult r;
    r.dataset = data.id;
    r.seed = cell.seed;
    r.method = cell.method;
    if (cell.method == "grid") {
        const auto res = grid_search_hybrid(data, experiment_grid(cfg.grid, cell.seed), split);
        r.test_mae = res.report.test_mae;
        r.fits = res.report.fits_performed;
        r.combinations_or_trials = res.report.combinations_evaluated;
        r.trace = res.report.trace;
    } else {
        HybridTpeOptions opts;
        opts.settings = cfg.tpe;
        opts.settings.seed = cell.seed;
        const auto res = tpe_search_hybrid(data, split, opts);
        r.test_mae = res.report.test_mae;
        r.fits = res.report.fits_performed;
        r.combinations_or_trials = res.report.trials;
        r.trace = res.tpe.trace;
    }
    r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::string results_csv(const std::vector<CellResult>& cells) {
    std::string out = "dataset,seed,method,test_mae,fits,combinations_or_trials,wall_time_s\n";
    for (const auto& c : cells)
        out += fmt::format("{},{},{},{},{},{},{:.3f}\n", c.dataset, c.seed, c.method, c.test_mae, c.fits,
                           c.combinations_or_trials, c.wall_time_s);
    return out;
}

std::string traces_csv(const std::vector<CellResult>& cells) {
    std::string out = "dataset,seed,method,trial_index,best_so_far\n";
    for (const auto& c : cells)
        for (std::size_t t = 0; t < c.trace.size(); ++t)
            out += fmt::format("{},{},{},{},{}\n", c.dataset, c.seed, c.method, t + 1, c.trace[t]);
    return out;
}

} // namespace

BenchmarkOutcome run_benchmark(const ExperimentConfig& cfg, int jobs) {
    cfg.check();
    std::vector<std::optional<Dataset>> data(cfg.datasets.size());
    std::vector<std::string> load_errors(cfg.datasets.size());
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        try {
            data[d] = load_csv_dataset(cfg.datasets[d].path, cfg.datasets[d].target);
            data[d]->check();
        } catch (const Error& e) {
            data[d].reset();
            load_errors[d] = e.what();
        }
    }

    std::vector<Cell> cells;
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        for (auto seed : cfg.seeds)
            for (const auto& m : cfg.methods) cells.push_back({d, seed, m});

    std::vector<std::optional<CellResult>> results(cells.size());
    std::vector<std::string> errors(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto name = cfg.datasets[cell.dataset].path.stem().string();
        if (!data[cell.dataset]) {
            errors[i] = fmt::format("{},{},{}: {}", name, cell.seed, cell.method, load_errors[cell.dataset]);
            return;
        }
        try {
            log_info(fmt::format("{} seed {} {}: start", name, cell.seed, cell.method));
            results[i] = run_cell(*data[cell.dataset], cell, cfg);
            log_info(fmt::format("{} seed {} {}: test MAE {:.5f} in {:.1f} s", name, cell.seed, cell.method,
                                 results[i]->test_mae, results[i]->wall_time_s));
        } catch (const std::exception& e) {
            errors[i] = fmt::format("{},{},{}: {}", name, cell.seed, cell.method, e.what());
        }
    });

    BenchmarkOutcome outcome;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (results[i]) outcome.cells.push_back(std::move(*results[i]));
        if (!errors[i].empty()) outcome.errors.push_back(errors[i]);
    }
    outcome.exit_code = outcome.errors.empty() ? 0 : 2;

    const auto& out = cfg.output_dir;
    std::filesystem::create_directories(out);
    write_text(out / "results.csv", results_csv(outcome.cells));
    write_text(out / "traces.csv", traces_csv(outcome.cells));
    std::error_code ec;
    std::filesystem::remove(out / "errors.log", ec);
    if (!outcome.errors.empty()) {
        std::string log;
        for (const auto& e : outcome.errors) log += e + "\n";
        write_text(out / "errors.log", log);
    }
    if (!outcome.cells.empty()) emit_report(outcome.cells, out);
    return outcome;
}

void emit_report(const std::vector<CellResult>& cells, const std::filesystem::path& out_dir) {
    if (cells.empty()) throw EmptyInput("no benchmark results to report");
    // groups in first-appearance order
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<const CellResult*>> groups;
    for (const auto& c : cells) {
        const auto key = std::make_pair(c.dataset, c.method);
        if (!groups.count(key)) keys.push_back(key);
        groups[key].push_back(&c);
    }

    std::string conv = "dataset,method,trial_index,mean_best_so_far,ci_half_width\n";
    std::string summary = "dataset,method,runs,mean_test_mae,test_mae_ci_half_width,mean_fits,"
                          "mean_combinations_or_trials,mean_wall_time_s\n";
    for (const auto& key : keys) {
        const auto& runs = groups[key];
        std::size_t len = 0;
        for (const auto* r : runs) len = std::max(len, r->trace.size());
        std::vector<std::vector<double>> padded;
        for (const auto* r : runs) {
            auto t = r->trace;
            if (!t.empty()) t.resize(len, t.back());
            if (!t.empty()) padded.push_back(std::move(t));
        }
        if (padded.size() >= 2) {
            const auto agg = aggregate_traces(padded);
            for (std::size_t t = 0; t < len; ++t)
                conv += fmt::format("{},{},{},{},{}\n", key.first, key.second, t + 1, agg.mean[t],
                                    agg.half_width[t]);
        } else if (padded.size() == 1) {
            for (std::size_t t = 0; t < len; ++t)
                conv += fmt::format("{},{},{},{},nan\n", key.first, key.second, t + 1, padded[0][t]);
        }

        std::vector<double> maes;
        double fits = 0.0;
        double combos = 0.0;
        double wall = 0.0;
        for (const auto* r : runs) {
            maes.push_back(r->test_mae);
            fits += static_cast<double>(r->fits);
            combos += static_cast<double>(r->combinations_or_trials);
            wall += r->wall_time_s;
        }
        const double n = static_cast<double>(runs.size());
        std::string half = "nan";
        double mean = maes.front();
        if (maes.size() >= 2) {
            std::sort(maes.begin(), maes.end());
            const auto ci = t_confidence_interval(maes);
            mean = ci.mean;
            half = fmt::format("{}", ci.half_width);
        }
        summary += fmt::format("{},{},{},{},{},{},{},{:.3f}\n", key.first, key.second, runs.size(), mean,
                               half, fits / n, combos / n, wall / n);
    }
    write_text(out_dir / "convergence.csv", conv);
    write_text(out_dir / "summary.csv", summary);
}

std::vector<CellResult> load_results(const std::filesystem::path& out_dir) {
    const auto results = read_csv(out_dir / "results.csv");
    const std::vector<std::string> expected{"dataset", "seed", "method", "test_mae",
                                            "fits", "combinations_or_trials", "wall_time_s"};
    if (results.header != expected) throw ParseError("results.csv has an unexpected header");
    std::vector<CellResult> cells;
    std::map<std::tuple<std::string, std::uint64_t, std::string>, std::size_t> index;
    try {
        for (const auto& row : results.rows) {
            CellResult c;
            c.dataset = row[0];
            c.seed = std::stoull(row[1]);
            c.method = row[2];
            c.test_mae = std::stod(row[3]);
            c.fits = std::stoull(row[4]);
            c.combinations_or_trials = std::stoull(row[5]);
            c.wall_time_s = std::stod(row[6]);
            index[{c.dataset, c.seed, c.method}] = cells.size();
            cells.push_back(std::move(c));
        }
        if (std::filesystem::exists(out_dir / "traces.csv")) {
            const auto traces = read_csv(out_dir / "traces.csv");
            for (const auto& row : traces.rows) {
                const auto it = index.find({row[0], std::stoull(row[1]), row[2]});
                if (it == index.end()) continue;
                cells[it->second].trace.push_back(std::stod(row[4]));
            }
        }
    } catch (const std::logic_error& e) {
        throw ParseError(fmt::format("{}: malformed benchmark output ({})", out_dir.string(), e.what()));
    }
    return cells;
}

} // namespace autohybrid
