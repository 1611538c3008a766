#pragma once

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pcp::stats {

inline double chi_squared_sf(double x, double dof) {
    boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// Pearson chi-square GOF p-value for binned counts against expected bin
// probabilities. Bins with tiny expectation are pooled into their neighbour.
inline double chisq_gof_pvalue(std::vector<double> observed, std::vector<double> expected) {
    double stat = 0.0;
    int used = 0;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0 || i + 1 == observed.size()) {
            if (e_acc > 0.0) {
                stat += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
                ++used;
            }
            o_acc = e_acc = 0.0;
        }
    }
    if (used < 2) return 1.0;
    return chi_squared_sf(stat, static_cast<double>(used - 1));
}

// Asymptotic Kolmogorov distribution tail with the Stephens small-sample
// correction.
inline double ks_pvalue(double d_stat, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double t = d_stat * (sn + 0.12 + 0.11 / sn);
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

// One-sample KS statistic against a given cdf.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

template <class Cdf>
double ks_test_pvalue(std::vector<double> sample, Cdf&& cdf) {
    const std::size_t n = sample.size();
    return ks_pvalue(ks_statistic(std::move(sample), cdf), n);
}

// Two-sample KS p-value with the usual effective sample size.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return ks_pvalue(d, static_cast<std::size_t>(ne));
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double standard_error(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace pcp::stats
