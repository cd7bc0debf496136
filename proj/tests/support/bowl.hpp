#pragma once

#include "autohybrid/config_space.hpp"
#include "autohybrid/tpe_optimizer.hpp"

namespace autohybrid::oracle {

/// Two continuous coordinates plus a categorical branch whose child does not affect Q.
inline ConfigurationSpace bowl_space() {
    return ConfigurationSpace({ParameterSpec::uniform("x", -5, 5), ParameterSpec::uniform("y", -5, 5),
                               ParameterSpec::categorical("branch", {"a", "b"}),
                               ParameterSpec::uniform("dummy", 0, 1, Condition{"branch", "a"})});
}

inline double bowl(const Configuration& c) {
    const double dx = c.number("x") - 1.0, dy = c.number("y") + 2.0;
    return dx * dx + dy * dy;
}

} // namespace autohybrid::oracle
