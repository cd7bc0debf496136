#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autohybrid/config_space.hpp"
#include "autohybrid/learners.hpp"

namespace autohybrid {

/// nu of the decider; the grid search reads the published "epsilon = 0.001" as nu.
inline constexpr double kDefaultNu = 0.001;
inline constexpr double kSvrC = 100.0;
inline constexpr double kSvrEpsilon = 0.001;

struct DeciderSpec {
    double sigma = 1.0;
    double nu = kDefaultNu;

    std::string label() const;
    friend bool operator==(const DeciderSpec&, const DeciderSpec&) = default;
};

/// Candidate sub-models of the exhaustive search.
struct HybridGrid {
    std::vector<LearnerSpec> predictors;
    std::vector<DeciderSpec> deciders;
};

/// Predictor grid: categorical "algorithm" with a conditional grid per learner
/// (MLP 18, SVR 13, GBM 16, RF 16, LR 1 = 64 configurations).
ConfigurationSpace predictor_grid_space();
/// Decider grid: 15 kernel widths.
ConfigurationSpace decider_grid_space();

LearnerSpec learner_from_grid_config(const Configuration& cfg, std::uint64_t seed);
HybridGrid default_hybrid_grid(std::uint64_t seed);

/// Conditional space of the Bayesian designer: three categorical roots (interpolator,
/// extrapolator, decider) with continuous children bounded by the grid extremes.
ConfigurationSpace hybrid_tpe_space();

struct HybridChoice {
    LearnerSpec interpolation;
    LearnerSpec extrapolation;
    DeciderSpec decider;
};

/// Integer-valued hyperparameters are rounded to the nearest integer.
HybridChoice hybrid_choice_from_config(const Configuration& cfg, std::uint64_t seed);
/// The inverse mapping, used to report grid choices in the same vocabulary.
Configuration hybrid_config(const LearnerSpec& interp, const LearnerSpec& extrap,
                            const DeciderSpec& decider);

} // namespace autohybrid
