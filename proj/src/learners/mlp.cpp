#include "autohybrid/learners/mlp.hpp"

#include <cmath>

#include "autohybrid/error.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid::learners {

MlpParameters init_mlp(Eigen::Index inputs, Eigen::Index neurons, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> hidden(-1.0 / std::sqrt(static_cast<double>(inputs)),
                                                  1.0 / std::sqrt(static_cast<double>(inputs)));
    std::uniform_real_distribution<double> output(-1.0 / std::sqrt(static_cast<double>(neurons)),
                                                  1.0 / std::sqrt(static_cast<double>(neurons)));
    MlpParameters net;
    net.hidden_weights.resize(neurons, inputs);
    for (Eigen::Index r = 0; r < neurons; ++r)
        for (Eigen::Index c = 0; c < inputs; ++c) net.hidden_weights(r, c) = hidden(rng);
    net.hidden_bias = Vector::Zero(neurons);
    net.output_weights.resize(neurons);
    for (Eigen::Index r = 0; r < neurons; ++r) net.output_weights(r) = output(rng);
    net.output_bias = 0.0;
    return net;
}

namespace {

Matrix hidden_activations(const MlpParameters& net, const Matrix& X) {
    Matrix pre = X * net.hidden_weights.transpose();
    pre.rowwise() += net.hidden_bias.transpose();
    return pre.array().tanh().matrix();
}

} // namespace

Vector mlp_forward(const MlpParameters& net, const Matrix& X) {
    return (hidden_activations(net, X) * net.output_weights).array() + net.output_bias;
}

double mlp_loss(const MlpParameters& net, const Matrix& X, const Vector& y,
                MlpParameters* grad) {
    const Matrix h = hidden_activations(net, X);
    const Vector out = (h * net.output_weights).array() + net.output_bias;
    const Vector err = out - y;
    const double n = static_cast<double>(X.rows());
    const double loss = 0.5 * err.squaredNorm() / n;
    if (grad != nullptr) {
        const Vector delta = err / n;
        grad->output_weights = h.transpose() * delta;
        grad->output_bias = delta.sum();
        const Matrix dh =
            ((delta * net.output_weights.transpose()).array() * (1.0 - h.array().square()))
                .matrix();
        grad->hidden_weights = dh.transpose() * X;
        grad->hidden_bias = dh.colwise().sum().transpose();
    }
    return loss;
}

MlpParameters train_mlp(MlpParameters net, const Matrix& X, const Vector& y,
                        const MlpTraining& training) {
    MlpParameters grad = net;
    MlpParameters m = net;
    MlpParameters v = net;
    m.hidden_weights.setZero();
    m.hidden_bias.setZero();
    m.output_weights.setZero();
    m.output_bias = 0.0;
    v = m;

    double b1t = 1.0;
    double b2t = 1.0;
    for (int epoch = 0; epoch < training.epochs; ++epoch) {
        mlp_loss(net, X, y, &grad);
        b1t *= training.beta1;
        b2t *= training.beta2;
        const double step = training.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        const double b1 = training.beta1;
        const double b2 = training.beta2;
        const double eps = training.adam_epsilon * std::sqrt(1.0 - b2t);

        auto adam = [&](auto& param, auto& mom, auto& vel, const auto& g) {
            mom = b1 * mom + (1.0 - b1) * g;
            vel = b2 * vel + (1.0 - b2) * g.cwiseProduct(g);
            param.array() -= step * mom.array() / (vel.array().sqrt() + eps);
        };
        adam(net.hidden_weights, m.hidden_weights, v.hidden_weights, grad.hidden_weights);
        adam(net.hidden_bias, m.hidden_bias, v.hidden_bias, grad.hidden_bias);
        adam(net.output_weights, m.output_weights, v.output_weights, grad.output_weights);
        m.output_bias = b1 * m.output_bias + (1.0 - b1) * grad.output_bias;
        v.output_bias = b2 * v.output_bias + (1.0 - b2) * grad.output_bias * grad.output_bias;
        net.output_bias -= step * m.output_bias / (std::sqrt(v.output_bias) + eps);
    }
    return net;
}

MlpRegressor MlpRegressor::fit(const Matrix& X, const Vector& y, int neurons, std::uint64_t seed,
                               const MlpTraining& training) {
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().mean());
    const double scale = sd > 1e-12 * (1.0 + std::abs(mean)) ? sd : 1.0;
    const Vector z = (y.array() - mean) / scale;
    auto net = train_mlp(init_mlp(X.cols(), neurons, seed), X, z, training);
    if (!net.hidden_weights.allFinite() || !net.output_weights.allFinite() ||
        !std::isfinite(net.output_bias))
        throw FitFailure("MLP training diverged");
    return MlpRegressor(std::move(net), mean, scale);
}

Vector MlpRegressor::predict(const Matrix& X) const {
    return (mlp_forward(net_, X).array() * target_scale_ + target_mean_).matrix();
}

nlohmann::json MlpRegressor::to_json() const {
    const auto& W = net_.hidden_weights;
    std::vector<double> w(static_cast<std::size_t>(W.size()));
    Eigen::Map<Matrix>(w.data(), W.rows(), W.cols()) = W;
    return {{"neurons", W.rows()},
            {"inputs", W.cols()},
            {"hidden_weights", w},
            {"hidden_bias", std::vector<double>(net_.hidden_bias.data(),
                                                net_.hidden_bias.data() + net_.hidden_bias.size())},
            {"output_weights",
             std::vector<double>(net_.output_weights.data(),
                                 net_.output_weights.data() + net_.output_weights.size())},
            {"output_bias", net_.output_bias},
            {"target_mean", target_mean_},
            {"target_scale", target_scale_}};
}

MlpRegressor MlpRegressor::from_json(const nlohmann::json& j) {
    const auto neurons = j.at("neurons").get<Eigen::Index>();
    const auto inputs = j.at("inputs").get<Eigen::Index>();
    const auto w = j.at("hidden_weights").get<std::vector<double>>();
    const auto hb = j.at("hidden_bias").get<std::vector<double>>();
    const auto ow = j.at("output_weights").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != neurons * inputs ||
        static_cast<Eigen::Index>(hb.size()) != neurons ||
        static_cast<Eigen::Index>(ow.size()) != neurons)
        throw ParseError("MLP blob has inconsistent shapes");
    MlpParameters net;
    net.hidden_weights = Eigen::Map<const Matrix>(w.data(), neurons, inputs);
    net.hidden_bias = Eigen::Map<const Vector>(hb.data(), neurons);
    net.output_weights = Eigen::Map<const Vector>(ow.data(), neurons);
    net.output_bias = j.at("output_bias").get<double>();
    return MlpRegressor(std::move(net), j.at("target_mean").get<double>(),
                        j.at("target_scale").get<double>());
}

} // namespace autohybrid::learners
