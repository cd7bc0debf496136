#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "autohybrid/renewables.hpp"

namespace autohybrid::oracle {

/// A 2 MW turbine tabulated every 0.5 m/s: cubic ramp from 3 to 12 m/s, flat to 25.
inline PowerCurve reference_turbine() {
    std::vector<double> v, p;
    for (int i = 0; i <= 50; ++i) {
        const double s = 0.5 * i;
        v.push_back(s);
        if (s <= 3.0) p.push_back(0.0);
        else if (s < 12.0) p.push_back(2000.0 * (s * s * s - 27.0) / (1728.0 - 27.0));
        else p.push_back(2000.0);
    }
    return PowerCurve(v, p, 3.0, 25.0);
}

/// Wind at measurement height, mostly within the ramp once lifted to the hub.
inline std::vector<double> site_wind(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::weibull_distribution<double> w(2.0, 5.0);
    std::vector<double> out(n);
    for (auto& x : out) x = std::min(w(rng), 12.0);
    return out;
}

} // namespace autohybrid::oracle
