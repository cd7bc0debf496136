#include "autohybrid/tpe_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/evaluation.hpp"
#include "autohybrid/log.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid {

void TpeSettings::check() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidConfig("TPE gamma must lie in (0, 1)");
    if (n_startup < 1) throw InvalidConfig("n_startup must be at least 1");
    if (n_candidates < 1) throw InvalidConfig("n_candidates must be at least 1");
    if (n_startup >= n_trials)
        throw InvalidConfig(fmt::format("n_startup ({}) must be below the trial budget ({})",
                                        n_startup, n_trials));
    if (early_stop && early_stop->patience < 1) throw InvalidConfig("patience must be at least 1");
    if (early_stop && !(early_stop->min_rel_improvement >= 0.0))
        throw InvalidConfig("min_rel_improvement must be non-negative");
}

std::size_t good_set_size(std::size_t n, double gamma) {
    return static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
}

namespace {

constexpr double kMinBandwidth = 0.01;
constexpr int kMaxRejections = 100;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Parzen mixture on [low, high] (log space for log-scale ranges): one truncated
/// Gaussian per observation plus a uniform prior component, equally weighted.
class ContinuousDensity {
public:
    ContinuousDensity(const ContinuousRange& range, std::vector<double> observations)
        : log_(range.log_scale),
          low_(log_ ? std::log(range.low) : range.low),
          high_(log_ ? std::log(range.high) : range.high) {
        for (double& o : observations) o = std::clamp(to_internal(o), low_, high_);
        std::sort(observations.begin(), observations.end());
        const double width = high_ - low_;
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const double left = i == 0 ? low_ : observations[i - 1];
            const double right = i + 1 == observations.size() ? high_ : observations[i + 1];
            const double mu = observations[i];
            double bw = std::max(mu - left, right - mu);
            bw = std::clamp(bw, kMinBandwidth * width, width);
            mus_.push_back(mu);
            sigmas_.push_back(bw);
            masses_.push_back(normal_cdf((high_ - mu) / bw) - normal_cdf((low_ - mu) / bw));
        }
    }

    double log_pdf(double x) const {
        const double u = std::clamp(to_internal(x), low_, high_);
        const double width = high_ - low_;
        double sum = width > 0.0 ? 1.0 / width : 1.0;
        for (std::size_t i = 0; i < mus_.size(); ++i) {
            const double z = (u - mus_[i]) / sigmas_[i];
            sum += std::exp(-0.5 * z * z) / (sigmas_[i] * std::sqrt(2.0 * M_PI) * masses_[i]);
        }
        return std::log(sum / static_cast<double>(mus_.size() + 1));
    }

    double sample(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> component(0, mus_.size());
        const auto c = component(rng);
        double u = 0.0;
        if (c == mus_.size()) {
            u = std::uniform_real_distribution<double>(low_, high_)(rng);
        } else {
            std::normal_distribution<double> normal(mus_[c], sigmas_[c]);
            u = normal(rng);
            for (int tries = 1; (u < low_ || u > high_) && tries < kMaxRejections; ++tries)
                u = normal(rng);
            u = std::clamp(u, low_, high_);
        }
        return log_ ? std::exp(u) : u;
    }

private:
    double to_internal(double x) const { return log_ ? std::log(x) : x; }

    bool log_;
    double low_;
    double high_;
    std::vector<double> mus_;
    std::vector<double> sigmas_;
    std::vector<double> masses_;
};

/// Laplace-smoothed frequencies over the choices of a finite domain.
class ChoiceDensity {
public:
    ChoiceDensity(std::size_t choices, const std::vector<std::size_t>& observed)
        : weights_(choices, 1.0) {
        for (auto i : observed) weights_[i] += 1.0;
        total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }
    double log_pdf(std::size_t i) const { return std::log(weights_[i] / total_); }
    std::size_t sample(Rng& rng) const {
        std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
        return pick(rng);
    }

private:
    std::vector<double> weights_;
    double total_ = 0.0;
};

std::size_t choice_index(const ParameterSpec& p, const Value& v) {
    if (const auto* g = std::get_if<GridValues>(&p.domain)) {
        const auto it = std::find(g->values.begin(), g->values.end(), v);
        return static_cast<std::size_t>(it - g->values.begin());
    }
    const auto& labels = std::get<Categorical>(p.domain).labels;
    const auto it = std::find(labels.begin(), labels.end(), std::get<std::string>(v));
    return static_cast<std::size_t>(it - labels.begin());
}

Value choice_value(const ParameterSpec& p, std::size_t i) {
    if (const auto* g = std::get_if<GridValues>(&p.domain)) return g->values[i];
    return std::get<Categorical>(p.domain).labels[i];
}

using Density = std::variant<ContinuousDensity, ChoiceDensity>;

/// One density per parameter, fitted on the trials where that parameter is active.
std::vector<Density> build_densities(const ConfigurationSpace& space,
                                     const std::vector<const Trial*>& trials) {
    std::vector<Density> out;
    for (const auto& p : space.parameters()) {
        if (const auto* range = std::get_if<ContinuousRange>(&p.domain)) {
            std::vector<double> obs;
            for (const auto* t : trials)
                if (t->config.has(p.name)) obs.push_back(t->config.number(p.name));
            out.emplace_back(ContinuousDensity(*range, std::move(obs)));
        } else {
            std::vector<std::size_t> obs;
            for (const auto* t : trials) {
                const auto it = t->config.assignments.find(p.name);
                if (it != t->config.assignments.end()) obs.push_back(choice_index(p, it->second));
            }
            out.emplace_back(ChoiceDensity(p.cardinality(), obs));
        }
    }
    return out;
}

bool parent_satisfied(const ConfigurationSpace& space, std::size_t i, const Configuration& cfg) {
    const auto& cond = space.parameters()[i].condition;
    if (!cond) return true;
    const auto it = cfg.assignments.find(cond->parent);
    return it != cfg.assignments.end() && std::get<std::string>(it->second) == cond->equals;
}

double log_density(const Density& d, const ParameterSpec& p, const Value& v) {
    if (const auto* c = std::get_if<ContinuousDensity>(&d)) return c->log_pdf(std::get<double>(v));
    return std::get<ChoiceDensity>(d).log_pdf(choice_index(p, v));
}

} // namespace

Configuration suggest_next(const ConfigurationSpace& space, const TrialHistory& history,
                           const TpeSettings& settings) {
    const auto stream_seed = derive_seed(settings.seed, history.size());
    std::vector<const Trial*> ok;
    for (const auto& t : history)
        if (t.ok()) ok.push_back(&t);
    if (history.size() < static_cast<std::size_t>(settings.n_startup) || ok.empty())
        return sample_random(space, stream_seed);

    std::vector<const Trial*> ranked;
    for (const auto& t : history) ranked.push_back(&t);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Trial* a, const Trial* b) { return a->score < b->score; });
    const auto n_good = std::min(good_set_size(history.size(), settings.gamma), ok.size());
    const std::vector<const Trial*> good(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n_good));
    const std::vector<const Trial*> bad(ranked.begin() + static_cast<std::ptrdiff_t>(n_good), ranked.end());

    const auto l = build_densities(space, good);
    const auto g = build_densities(space, bad);
    const auto& params = space.parameters();

    Rng rng(stream_seed);
    Configuration best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < settings.n_candidates; ++c) {
        Configuration cand;
        double score = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!parent_satisfied(space, i, cand)) continue;
            Value v;
            if (const auto* cd = std::get_if<ContinuousDensity>(&l[i]))
                v = cd->sample(rng);
            else
                v = choice_value(params[i], std::get<ChoiceDensity>(l[i]).sample(rng));
            score += log_density(l[i], params[i], v) - log_density(g[i], params[i], v);
            cand.set(params[i].name, std::move(v));
        }
        if (score > best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

TrialHistory observe(const ConfigurationSpace& space, const TrialHistory& history, Trial trial) {
    if (const auto v = validate(space, trial.config))
        throw InvalidConfig(fmt::format("trial configuration rejected ({}): {}", v->rule, v->message));
    if (!trial.ok() || !std::isfinite(trial.score)) {
        trial.status = TrialStatus::failed;
        trial.score = std::numeric_limits<double>::infinity();
    }
    TrialHistory out = history;
    out.push_back(std::move(trial));
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class Suggest>
TpeResult optimize(const Objective& objective, const TpeSettings& settings, Suggest&& suggest) {
    settings.check();
    TpeResult res;
    res.history.reserve(static_cast<std::size_t>(settings.n_trials));
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int t = 0; t < settings.n_trials; ++t) {
        Trial trial;
        trial.config = suggest(res.history);
        const auto start = Clock::now();
        try {
            trial.score = objective(trial.config);
            trial.status = std::isfinite(trial.score) ? TrialStatus::ok : TrialStatus::failed;
        } catch (const std::exception& e) {
            log_warning(fmt::format("trial {} failed: {}", t + 1, e.what()));
            trial.status = TrialStatus::failed;
        }
        trial.duration_s = std::chrono::duration<double>(Clock::now() - start).count();
        if (!trial.ok()) trial.score = std::numeric_limits<double>::infinity();

        const bool improved = trial.score < best - (std::isfinite(best) && settings.early_stop
                                                        ? settings.early_stop->min_rel_improvement * std::abs(best)
                                                        : 0.0);
        if (trial.score < best) {
            best = trial.score;
            res.best_index = res.history.size();
        }
        res.history.push_back(std::move(trial));
        res.trace.push_back(best);

        if (!settings.early_stop || t < settings.n_startup) continue;
        stale = improved ? 0 : stale + 1;
        if (stale >= settings.early_stop->patience) {
            res.stopped_early = t + 1 < settings.n_trials;
            break;
        }
    }
    return res;
}

} // namespace

TpeResult run_tpe(const Objective& objective, const ConfigurationSpace& space,
                  const TpeSettings& settings) {
    return optimize(objective, settings, [&](const TrialHistory& h) {
        return suggest_next(space, h, settings);
    });
}

TpeResult run_random_search(const Objective& objective, const ConfigurationSpace& space,
                            const TpeSettings& settings) {
    return optimize(objective, settings, [&](const TrialHistory& h) {
        return sample_random(space, derive_seed(settings.seed, h.size()));
    });
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace

void write_trace_csv(std::ostream& out, const TpeResult& result) {
    out << "trial_index,Q,best_so_far,duration_s,config_json\n";
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& t = result.history[i];
        out << fmt::format("{},{},{},{:.6f},{}\n", i + 1, t.score, result.trace[i], t.duration_s,
                           csv_quote(to_json(t.config).dump()));
    }
}

} // namespace autohybrid
