#include "autohybrid/hybrid_model.hpp"

#include <fmt/format.h>

#include "autohybrid/error.hpp"

namespace autohybrid {

HybridModel assemble(TrainedModel interp, TrainedModel extrap, OneClassSvm decider,
                     Configuration cfg) {
    if (interp.input_dim() != extrap.input_dim() || interp.input_dim() != decider.input_dim())
        throw SchemaMismatch(fmt::format(
            "component dimensions differ: interpolation {}, extrapolation {}, decider {}",
            interp.input_dim(), extrap.input_dim(), decider.input_dim()));
    return HybridModel(std::move(interp), std::move(extrap), std::move(decider), std::move(cfg));
}

Vector HybridModel::predict(const Matrix& X) const {
    if (X.cols() != input_dim())
        throw DimensionMismatch(fmt::format("hybrid model expects {} features, got {}",
                                            input_dim(), X.cols()));
    if (X.rows() == 0) return Vector(0);
    const Vector yi = interp_.predict(X);
    const Vector ye = extrap_.predict(X);
    const Vector mu = decider_.memberships(X);
    Vector out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) = blend(mu(r), yi(r), ye(r));
    return out;
}

nlohmann::json HybridModel::to_json() const {
    return {{"schema", "autohybrid.hybrid/1"},
            {"interpolation", interp_.to_json()},
            {"extrapolation", extrap_.to_json()},
            {"decider", decider_.to_json()},
            {"config", autohybrid::to_json(config_)}};
}

HybridModel HybridModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != "autohybrid.hybrid/1")
            throw ParseError("unsupported hybrid schema");
        return assemble(TrainedModel::from_json(j.at("interpolation")),
                        TrainedModel::from_json(j.at("extrapolation")),
                        OneClassSvm::from_json(j.at("decider")),
                        configuration_from_json(j.at("config")));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed hybrid blob: ") + e.what());
    }
}

} // namespace autohybrid
