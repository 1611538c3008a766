#pragma once

#include <cmath>

#include "pcp/quadrature.hpp"

namespace test_support {

// Mass of a density over the sliver between `inner` and the support edge,
// integrated in w = log|edge - x| so boundary spikes become bounded smooth
// integrands. Stops at |edge - x| = closest: nearer than ~1e-9 the spacing
// of doubles around the edge turns evaluations into quantization noise, so
// callers should bound the rest analytically.
template <class F>
double edge_mass(F&& density, double edge, double inner, double closest = 1e-7) {
    const double sign = inner < edge ? -1.0 : 1.0;  // x = edge + sign e^w
    return pcp::quad::integrate(
        [&](double w) {
            const double u = std::exp(w);
            return density(edge + sign * u) * u;
        },
        std::log(closest), std::log(std::abs(edge - inner)), 1e-13, 1e-11);
}

}  // namespace test_support
