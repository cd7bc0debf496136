#pragma once

#include <cstdint>

#include "autohybrid/learners.hpp"

namespace autohybrid::learners {

/// One hidden tanh layer with a linear output unit.
struct MlpParameters {
    Matrix hidden_weights;   // neurons x inputs
    Vector hidden_bias;      // neurons
    Vector output_weights;   // neurons
    double output_bias = 0.0;

    Eigen::Index neurons() const noexcept { return hidden_weights.rows(); }
};

struct MlpTraining {
    int epochs = 500;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero.
MlpParameters init_mlp(Eigen::Index inputs, Eigen::Index neurons, std::uint64_t seed);

Vector mlp_forward(const MlpParameters& net, const Matrix& X);

/// Half mean squared error; fills `grad` with the analytic gradient when non-null.
double mlp_loss(const MlpParameters& net, const Matrix& X, const Vector& y,
                MlpParameters* grad = nullptr);

/// Full-batch Adam.
MlpParameters train_mlp(MlpParameters net, const Matrix& X, const Vector& y,
                        const MlpTraining& training);

/// The network is trained on a z-scored target; predictions are mapped back.
class MlpRegressor final : public Regressor {
public:
    MlpRegressor(MlpParameters net, double target_mean, double target_scale)
        : net_(std::move(net)), target_mean_(target_mean), target_scale_(target_scale) {}

    static MlpRegressor fit(const Matrix& X, const Vector& y, int neurons, std::uint64_t seed,
                            const MlpTraining& training = {});

    Vector predict(const Matrix& X) const override;
    nlohmann::json to_json() const override;
    static MlpRegressor from_json(const nlohmann::json& j);

    const MlpParameters& network() const noexcept { return net_; }

private:
    MlpParameters net_;
    double target_mean_;
    double target_scale_;
};

} // namespace autohybrid::learners
