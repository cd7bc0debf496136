#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "autohybrid/dataset.hpp"

namespace autohybrid {

enum class Algorithm { LR, MLP, SVR, RF, GBM };

std::string_view to_string(Algorithm a) noexcept;
/// Throws InvalidSpec for unknown names.
Algorithm algorithm_from_string(std::string_view name);

// Hyperparameter keys.
inline constexpr std::string_view kNeurons = "n_neurons";
inline constexpr std::string_view kSigma = "sigma";
inline constexpr std::string_view kC = "C";
inline constexpr std::string_view kEpsilon = "epsilon";
inline constexpr std::string_view kEstimators = "n_estimators";

struct LearnerSpec {
    Algorithm algorithm = Algorithm::LR;
    std::map<std::string, double, std::less<>> hyperparameters;
    std::uint64_t seed = 0;

    static LearnerSpec linear(std::uint64_t seed = 0);
    static LearnerSpec mlp(int neurons, std::uint64_t seed = 0);
    static LearnerSpec svr(double sigma, double C = 100.0, double epsilon = 0.001,
                           std::uint64_t seed = 0);
    static LearnerSpec random_forest(int estimators, std::uint64_t seed = 0);
    static LearnerSpec gradient_boosting(int estimators, std::uint64_t seed = 0);

    double get(std::string_view key) const;
    /// Throws InvalidSpec if a hyperparameter is missing or out of range.
    void check() const;
    /// Short human-readable id, e.g. "MLP(n_neurons=3)".
    std::string label() const;

    friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

/// Inference on standardized features.
class Regressor {
public:
    virtual ~Regressor() = default;
    virtual Vector predict(const Matrix& standardized) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// Immutable fitted model; copies share the fitted parameters.
class TrainedModel {
public:
    TrainedModel(Algorithm algorithm, Standardizer standardizer,
                 std::shared_ptr<const Regressor> regressor);

    Algorithm algorithm() const noexcept { return algorithm_; }
    Eigen::Index input_dim() const noexcept { return standardizer_.dimension(); }
    const Standardizer& standardizer() const noexcept { return standardizer_; }
    const Regressor& regressor() const noexcept { return *regressor_; }

    /// Throws DimensionMismatch when X has the wrong column count.
    Vector predict(const Matrix& X) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

private:
    Algorithm algorithm_;
    Standardizer standardizer_;
    std::shared_ptr<const Regressor> regressor_;
};

/// Deterministic for a fixed (spec, data). Throws InvalidSpec, InvalidDataset, FitFailure.
TrainedModel fit(const LearnerSpec& spec, const Dataset& train);

inline Vector predict(const TrainedModel& model, const Matrix& X) { return model.predict(X); }

/// Slope and intercept of a fitted LR model in the original feature units.
struct LinearCoefficients {
    Vector weights;
    double intercept = 0.0;
};
LinearCoefficients linear_coefficients(const TrainedModel& model);

// Serialization helpers shared with the decider.
nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

} // namespace autohybrid
