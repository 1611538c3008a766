#pragma once

#include <cmath>
#include <functional>

#include "pcp/common.hpp"

namespace pcp {

// Bisection on [lo, hi]. Requires a sign change; returns the midpoint once
// the residual |f(x)| <= f_tol or the bracket width falls below x_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double f_tol = 1e-10, double x_tol = 1e-14) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NumericalError("bisect: no sign change over bracket");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= f_tol || (hi - lo) <= x_tol * (1.0 + std::abs(mid))) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return mid;
}

}  // namespace pcp
