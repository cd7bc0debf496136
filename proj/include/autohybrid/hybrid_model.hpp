#pragma once

#include <algorithm>

#include <json.hpp>

#include "autohybrid/config_space.hpp"
#include "autohybrid/learners.hpp"
#include "autohybrid/one_class_svm.hpp"

namespace autohybrid {

/// Blends an interpolation and an extrapolation model row by row:
/// y(x) = mu(x) * y_interp(x) + (1 - mu(x)) * y_extrap(x), mu from the decider.
class HybridModel {
public:
    const TrainedModel& interpolation() const noexcept { return interp_; }
    const TrainedModel& extrapolation() const noexcept { return extrap_; }
    const OneClassSvm& decider() const noexcept { return decider_; }
    const Configuration& chosen_config() const noexcept { return config_; }
    Eigen::Index input_dim() const noexcept { return interp_.input_dim(); }

    /// Throws DimensionMismatch.
    Vector predict(const Matrix& X) const;

    nlohmann::json to_json() const;
    static HybridModel from_json(const nlohmann::json& j);

private:
    HybridModel(TrainedModel interp, TrainedModel extrap, OneClassSvm decider, Configuration cfg)
        : interp_(std::move(interp)), extrap_(std::move(extrap)), decider_(std::move(decider)),
          config_(std::move(cfg)) {}

    TrainedModel interp_;
    TrainedModel extrap_;
    OneClassSvm decider_;
    Configuration config_;

    friend HybridModel assemble(TrainedModel, TrainedModel, OneClassSvm, Configuration);
};

/// Throws SchemaMismatch when the three components disagree on the input dimension.
HybridModel assemble(TrainedModel interp, TrainedModel extrap, OneClassSvm decider,
                     Configuration cfg = {});

inline Vector predict_hybrid(const HybridModel& h, const Matrix& X) { return h.predict(X); }

/// The blending rule shared by the hybrid model and the cached grid search.
inline double blend(double mu, double interp, double extrap) noexcept {
    const double y = mu * interp + (1.0 - mu) * extrap;
    return std::clamp(y, std::min(interp, extrap), std::max(interp, extrap));
}

} // namespace autohybrid
