#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <utility>

#include "pcp/common.hpp"

namespace pcp::quad {

namespace detail {

// Infinite ranges are folded onto a finite interval with a rational map and
// handed to tanh-sinh, which absorbs the induced endpoint singularities that
// defeat plain Gauss-Kronrod on heavy-tailed densities. Non-finite values in
// the extreme mapped tail are treated as zero: a proper integrand has no
// mass out there, only overflowed intermediate terms.
template <class F>
double mapped_tail_integral(F& f, double a, double b, double tol) {
    boost::math::quadrature::tanh_sinh<double> rule;
    auto guarded = [&f](double x, double jac) -> double {
        if (!std::isfinite(x)) return 0.0;
        const double v = f(x) * jac;
        if (!std::isfinite(v)) {
            if (std::abs(x) > 1e12) return 0.0;
            throw NumericalError("integrate: non-finite integrand value");
        }
        return v;
    };
    if (std::isinf(a) && std::isinf(b)) {
        return rule.integrate(
            [&](double t) {
                const double om = (1.0 - t) * (1.0 + t);
                return guarded(t / om, (1.0 + t * t) / (om * om));
            },
            -1.0, 1.0, tol);
    }
    if (std::isinf(b)) {
        return rule.integrate(
            [&](double t) {
                const double om = 1.0 - t;
                return guarded(a + t / om, 1.0 / (om * om));
            },
            0.0, 1.0, tol);
    }
    return rule.integrate(
        [&](double t) {
            const double om = 1.0 - t;
            return guarded(b - t / om, 1.0 / (om * om));
        },
        0.0, 1.0, tol);
}

}  // namespace detail

// Adaptive quadrature on [a, b]; either endpoint may be infinite.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-8) {
    if (std::isinf(a) || std::isinf(b)) {
        return detail::mapped_tail_integral(f, a, b, std::max(rel_tol, 1e-12));
    }
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1 = 0.0;
    const double v =
        gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, 18, rel_tol, &error, &l1);
    const double floor = std::max({abs_tol, 1e-7 * l1, 1e-7 * std::abs(v)});
    if (!(error <= floor) && !(error <= 1e3 * rel_tol * std::max(l1, std::abs(v)))) {
        throw NumericalError("gauss_kronrod quadrature failed to converge");
    }
    return v;
}

// tanh-sinh on a finite interval; the tool for integrable endpoint spikes.
template <class F>
double integrate_singular(F&& f, double a, double b, double tol = 1e-10) {
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(std::forward<F>(f), a, b, tol);
}

}  // namespace pcp::quad
