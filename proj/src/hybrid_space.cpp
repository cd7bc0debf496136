#include "autohybrid/hybrid_space.hpp"

#include <cmath>

#include <fmt/format.h>

#include "autohybrid/error.hpp"

namespace autohybrid {

namespace {

const std::vector<std::string> kAlgorithms = {"MLP", "SVR", "GBM", "RF", "LR"};

std::vector<double> neuron_grid() {
    std::vector<double> v;
    for (int k = 2; k <= 17; ++k) v.push_back(k);
    v.push_back(30);
    v.push_back(50);
    return v;
}

std::vector<double> svr_sigma_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0};
}

std::vector<double> estimator_grid() {
    std::vector<double> v{90};
    for (int k = 100; k <= 150; k += 10) v.push_back(k);
    for (int k = 200; k <= 1000; k += 100) v.push_back(k);
    return v;
}

std::vector<double> decider_sigma_grid() {
    return {0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 10.0};
}

Condition when(const std::string& parent, const std::string& label) {
    return Condition{parent, label};
}

void add_learner_children(std::vector<ParameterSpec>& params, const std::string& root,
                          const std::string& prefix) {
    params.push_back(ParameterSpec::uniform(prefix + "n_neurons", 2, 50, when(root, "MLP")));
    params.push_back(ParameterSpec::log_uniform(prefix + "sigma", 0.1, 2.0, when(root, "SVR")));
    params.push_back(
        ParameterSpec::uniform(prefix + "gbm_n_estimators", 90, 1000, when(root, "GBM")));
    params.push_back(ParameterSpec::uniform(prefix + "rf_n_estimators", 90, 1000, when(root, "RF")));
}

LearnerSpec learner_from(const Configuration& cfg, const std::string& root,
                         const std::string& prefix, std::uint64_t seed) {
    const auto algorithm = algorithm_from_string(cfg.label(root));
    auto rounded = [&](const std::string& key) {
        return static_cast<int>(std::lround(cfg.number(prefix + key)));
    };
    switch (algorithm) {
    case Algorithm::LR: return LearnerSpec::linear(seed);
    case Algorithm::MLP: return LearnerSpec::mlp(rounded("n_neurons"), seed);
    case Algorithm::SVR:
        return LearnerSpec::svr(cfg.number(prefix + "sigma"), kSvrC, kSvrEpsilon, seed);
    case Algorithm::GBM: return LearnerSpec::gradient_boosting(rounded("gbm_n_estimators"), seed);
    case Algorithm::RF: return LearnerSpec::random_forest(rounded("rf_n_estimators"), seed);
    }
    throw InvalidConfig("unreachable");
}

void put_learner(Configuration& cfg, const LearnerSpec& spec, const std::string& root,
                 const std::string& prefix) {
    cfg.set(root, std::string(to_string(spec.algorithm)));
    switch (spec.algorithm) {
    case Algorithm::LR: break;
    case Algorithm::MLP: cfg.set(prefix + "n_neurons", spec.get(kNeurons)); break;
    case Algorithm::SVR: cfg.set(prefix + "sigma", spec.get(kSigma)); break;
    case Algorithm::GBM: cfg.set(prefix + "gbm_n_estimators", spec.get(kEstimators)); break;
    case Algorithm::RF: cfg.set(prefix + "rf_n_estimators", spec.get(kEstimators)); break;
    }
}

} // namespace

std::string DeciderSpec::label() const {
    return fmt::format("1C-SVM(sigma={},nu={})", sigma, nu);
}

ConfigurationSpace predictor_grid_space() {
    return ConfigurationSpace({
        ParameterSpec::categorical("algorithm", kAlgorithms),
        ParameterSpec::grid("n_neurons", neuron_grid(), when("algorithm", "MLP")),
        ParameterSpec::grid("sigma", svr_sigma_grid(), when("algorithm", "SVR")),
        ParameterSpec::grid("gbm_n_estimators", estimator_grid(), when("algorithm", "GBM")),
        ParameterSpec::grid("rf_n_estimators", estimator_grid(), when("algorithm", "RF")),
    });
}

ConfigurationSpace decider_grid_space() {
    return ConfigurationSpace({ParameterSpec::grid("sigma", decider_sigma_grid())});
}

LearnerSpec learner_from_grid_config(const Configuration& cfg, std::uint64_t seed) {
    return learner_from(cfg, "algorithm", "", seed);
}

HybridGrid default_hybrid_grid(std::uint64_t seed) {
    HybridGrid grid;
    for (const auto& cfg : enumerate_grid(predictor_grid_space()))
        grid.predictors.push_back(learner_from_grid_config(cfg, seed));
    for (const auto& cfg : enumerate_grid(decider_grid_space()))
        grid.deciders.push_back(DeciderSpec{cfg.number("sigma"), kDefaultNu});
    return grid;
}

ConfigurationSpace hybrid_tpe_space() {
    std::vector<ParameterSpec> params;
    params.push_back(ParameterSpec::categorical("interpolator", kAlgorithms));
    add_learner_children(params, "interpolator", "interp_");
    params.push_back(ParameterSpec::categorical("extrapolator", kAlgorithms));
    add_learner_children(params, "extrapolator", "extrap_");
    params.push_back(ParameterSpec::categorical("decider", {"1C-SVM"}));
    params.push_back(
        ParameterSpec::log_uniform("decider_sigma", 0.01, 10.0, when("decider", "1C-SVM")));
    return ConfigurationSpace(std::move(params));
}

HybridChoice hybrid_choice_from_config(const Configuration& cfg, std::uint64_t seed) {
    return HybridChoice{learner_from(cfg, "interpolator", "interp_", seed),
                        learner_from(cfg, "extrapolator", "extrap_", seed),
                        DeciderSpec{cfg.number("decider_sigma"), kDefaultNu}};
}

Configuration hybrid_config(const LearnerSpec& interp, const LearnerSpec& extrap,
                            const DeciderSpec& decider) {
    Configuration cfg;
    put_learner(cfg, interp, "interpolator", "interp_");
    put_learner(cfg, extrap, "extrapolator", "extrap_");
    cfg.set("decider", std::string("1C-SVM"));
    cfg.set("decider_sigma", decider.sigma);
    return cfg;
}

} // namespace autohybrid
