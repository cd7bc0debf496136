#include "autohybrid/learners.hpp"

#include <cmath>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/learners/ensembles.hpp"
#include "autohybrid/learners/linear.hpp"
#include "autohybrid/learners/mlp.hpp"
#include "autohybrid/learners/svr.hpp"

namespace autohybrid {

namespace {
constexpr std::string_view kModelSchema = "autohybrid.model/1";
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::LR: return "LR";
    case Algorithm::MLP: return "MLP";
    case Algorithm::SVR: return "SVR";
    case Algorithm::RF: return "RF";
    case Algorithm::GBM: return "GBM";
    }
    return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
    for (auto a : {Algorithm::LR, Algorithm::MLP, Algorithm::SVR, Algorithm::RF, Algorithm::GBM})
        if (to_string(a) == name) return a;
    throw InvalidSpec("unknown algorithm '" + std::string(name) + "'");
}

LearnerSpec LearnerSpec::linear(std::uint64_t seed) {
    return {Algorithm::LR, {}, seed};
}

LearnerSpec LearnerSpec::mlp(int neurons, std::uint64_t seed) {
    return {Algorithm::MLP, {{std::string(kNeurons), static_cast<double>(neurons)}}, seed};
}

LearnerSpec LearnerSpec::svr(double sigma, double C, double epsilon, std::uint64_t seed) {
    return {Algorithm::SVR,
            {{std::string(kSigma), sigma}, {std::string(kC), C}, {std::string(kEpsilon), epsilon}},
            seed};
}

LearnerSpec LearnerSpec::random_forest(int estimators, std::uint64_t seed) {
    return {Algorithm::RF, {{std::string(kEstimators), static_cast<double>(estimators)}}, seed};
}

LearnerSpec LearnerSpec::gradient_boosting(int estimators, std::uint64_t seed) {
    return {Algorithm::GBM, {{std::string(kEstimators), static_cast<double>(estimators)}}, seed};
}

double LearnerSpec::get(std::string_view key) const {
    auto it = hyperparameters.find(key);
    if (it == hyperparameters.end())
        throw InvalidSpec(fmt::format("{} needs hyperparameter '{}'", to_string(algorithm), key));
    return it->second;
}

void LearnerSpec::check() const {
    auto positive_int = [&](std::string_view key) {
        const double v = get(key);
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e7)
            throw InvalidSpec(fmt::format("{} must be a positive integer, got {}", key, v));
    };
    switch (algorithm) {
    case Algorithm::LR: break;
    case Algorithm::MLP: positive_int(kNeurons); break;
    case Algorithm::RF:
    case Algorithm::GBM: positive_int(kEstimators); break;
    case Algorithm::SVR:
        if (!(get(kSigma) > 0.0) || !std::isfinite(get(kSigma)))
            throw InvalidSpec("SVR sigma must be positive");
        if (!(get(kC) > 0.0) || !std::isfinite(get(kC))) throw InvalidSpec("SVR C must be positive");
        if (!(get(kEpsilon) >= 0.0) || !std::isfinite(get(kEpsilon)))
            throw InvalidSpec("SVR epsilon must be non-negative");
        break;
    }
}

std::string LearnerSpec::label() const {
    switch (algorithm) {
    case Algorithm::LR: return "LR";
    case Algorithm::MLP: return fmt::format("MLP(n_neurons={})", get(kNeurons));
    case Algorithm::SVR:
        return fmt::format("SVR(sigma={},C={},epsilon={})", get(kSigma), get(kC), get(kEpsilon));
    case Algorithm::RF: return fmt::format("RF(n_estimators={})", get(kEstimators));
    case Algorithm::GBM: return fmt::format("GBM(n_estimators={})", get(kEstimators));
    }
    return "?";
}

TrainedModel::TrainedModel(Algorithm algorithm, Standardizer standardizer,
                           std::shared_ptr<const Regressor> regressor)
    : algorithm_(algorithm), standardizer_(std::move(standardizer)),
      regressor_(std::move(regressor)) {}

Vector TrainedModel::predict(const Matrix& X) const {
    if (X.cols() != input_dim())
        throw DimensionMismatch(fmt::format("model expects {} features, got {}", input_dim(),
                                            X.cols()));
    if (X.rows() == 0) return Vector(0);
    return regressor_->predict(standardizer_.apply(X));
}

nlohmann::json standardizer_to_json(const Standardizer& s) {
    return {{"mean", std::vector<double>(s.mean().data(), s.mean().data() + s.mean().size())},
            {"scale", std::vector<double>(s.scale().data(), s.scale().data() + s.scale().size())}};
}

Standardizer standardizer_from_json(const nlohmann::json& j) {
    const auto m = j.at("mean").get<std::vector<double>>();
    const auto s = j.at("scale").get<std::vector<double>>();
    if (m.size() != s.size()) throw ParseError("standardizer blob has inconsistent shapes");
    const auto d = static_cast<Eigen::Index>(m.size());
    return Standardizer(Eigen::Map<const Vector>(m.data(), d), Eigen::Map<const Vector>(s.data(), d));
}

nlohmann::json TrainedModel::to_json() const {
    return {{"schema", kModelSchema},
            {"algorithm", to_string(algorithm_)},
            {"standardizer", standardizer_to_json(standardizer_)},
            {"parameters", regressor_->to_json()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kModelSchema)
            throw ParseError("unsupported model schema '" + j.at("schema").get<std::string>() + "'");
        const auto algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
        auto standardizer = standardizer_from_json(j.at("standardizer"));
        const auto& p = j.at("parameters");
        std::shared_ptr<const Regressor> reg;
        switch (algorithm) {
        case Algorithm::LR:
            reg = std::make_shared<learners::LinearRegressor>(learners::LinearRegressor::from_json(p));
            break;
        case Algorithm::MLP:
            reg = std::make_shared<learners::MlpRegressor>(learners::MlpRegressor::from_json(p));
            break;
        case Algorithm::SVR:
            reg = std::make_shared<learners::SvrRegressor>(learners::SvrRegressor::from_json(p));
            break;
        case Algorithm::RF:
            reg = std::make_shared<learners::RandomForestRegressor>(
                learners::RandomForestRegressor::from_json(p));
            break;
        case Algorithm::GBM:
            reg = std::make_shared<learners::GradientBoostingRegressor>(
                learners::GradientBoostingRegressor::from_json(p));
            break;
        }
        return TrainedModel(algorithm, std::move(standardizer), std::move(reg));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model blob: ") + e.what());
    }
}

TrainedModel fit(const LearnerSpec& spec, const Dataset& train) {
    spec.check();
    train.check();
    auto standardizer = Standardizer::fit(train.features);
    const Matrix X = standardizer.apply(train.features);
    const Vector& y = train.target;

    std::shared_ptr<const Regressor> reg;
    switch (spec.algorithm) {
    case Algorithm::LR:
        reg = std::make_shared<learners::LinearRegressor>(learners::LinearRegressor::fit(X, y));
        break;
    case Algorithm::MLP:
        reg = std::make_shared<learners::MlpRegressor>(learners::MlpRegressor::fit(
            X, y, static_cast<int>(spec.get(kNeurons)), spec.seed));
        break;
    case Algorithm::SVR:
        reg = std::make_shared<learners::SvrRegressor>(learners::SvrRegressor::fit(
            X, y, spec.get(kSigma), spec.get(kC), spec.get(kEpsilon)));
        break;
    case Algorithm::RF:
        reg = std::make_shared<learners::RandomForestRegressor>(
            learners::RandomForestRegressor::fit(X, y, static_cast<int>(spec.get(kEstimators)),
                                                 spec.seed));
        break;
    case Algorithm::GBM:
        reg = std::make_shared<learners::GradientBoostingRegressor>(
            learners::GradientBoostingRegressor::fit(X, y, static_cast<int>(spec.get(kEstimators)),
                                                     spec.seed));
        break;
    }
    return TrainedModel(spec.algorithm, std::move(standardizer), std::move(reg));
}

LinearCoefficients linear_coefficients(const TrainedModel& model) {
    const auto* lr = dynamic_cast<const learners::LinearRegressor*>(&model.regressor());
    if (lr == nullptr) throw InvalidSpec("model is not a linear regression");
    const auto& s = model.standardizer();
    LinearCoefficients out;
    out.weights = lr->weights().array() / s.scale().array();
    out.intercept = lr->intercept() - out.weights.dot(s.mean());
    return out;
}

} // namespace autohybrid
