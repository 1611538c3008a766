#include "pcp/univariate.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <mutex>
#include <vector>

#include "pcp/interp.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/roots.hpp"

namespace pcp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kSqrtThreeHalves = 1.2247448713915890490986420373529;
}  // namespace

double log_student_t_unit_variance(double y, double nu) {
    if (!(nu > 2.0)) throw std::domain_error("log_student_t_unit_variance: nu must exceed 2");
    const double s2 = (nu - 2.0) / nu;  // squared scale making the variance 1
    const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                     0.5 * std::log(nu * M_PI) - 0.5 * std::log(s2);
    return c - 0.5 * (nu + 1.0) * std::log1p(y * y / (s2 * nu));
}

// ---------------------------------------------------------------------------
// precision

PrecisionPrior::PrecisionPrior(double rate) : rate_(rate) {
    if (!(rate > 0.0)) throw std::domain_error("PrecisionPrior: rate must be positive");
}

PrecisionPrior PrecisionPrior::calibrate(double u, double alpha) {
    if (!(u > 0.0) || !(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("PrecisionPrior::calibrate: need u > 0 and alpha in (0,1)");
    return PrecisionPrior(-std::log(alpha) / u);
}

double PrecisionPrior::density(double tau) const {
    if (!(tau > 0.0)) throw std::domain_error("PrecisionPrior::density: tau must be positive");
    // log-space keeps the tau^{-3/2} overflow and the vanishing exponential
    // from meeting as inf * 0
    return std::exp(std::log(0.5 * rate_) - 1.5 * std::log(tau) - rate_ / std::sqrt(tau));
}

double PrecisionPrior::sample(Rng& rng) const {
    const double sigma = rng.exponential(rate_);
    return 1.0 / (sigma * sigma);
}

DistanceFunction PrecisionPrior::distance() const {
    return DistanceFunction([](double tau) { return 1.0 / std::sqrt(tau); }, Interval{0.0, kInf},
                            kInf,
                            [](double tau) { return -0.5 * std::pow(tau, -1.5); });
}

// ---------------------------------------------------------------------------
// Student-t

struct StudentTDistance::Impl {
    MonotoneCubic curve;       // d versus log(nu - 2)
    double kld_lo_offset = 0;  // continuation constant below the table
    double nu_lo = 0, nu_hi = 0;
    double d_at_lo = 0, d_at_hi = 0;
};

double StudentTDistance::kld_quadrature(double nu) {
    if (!(nu > 2.0)) throw std::domain_error("StudentTDistance: nu must exceed 2");
    // Working in standard-t units y = s t, the ratio splits as
    //   log g - log phi = [log f - log phi_std](t) + (s^2-1) t^2 / 2 - log s
    // and E[t^2] = nu/(nu-2) is exact, so only bounded quadratures remain.
    // The normalising constant goes through tgamma_delta_ratio: the naive
    // lgamma difference cancels ~1e6-sized values at large nu and poisons
    // the nu^{-2}-sized result.
    const double s2 = (nu - 2.0) / nu;
    const double c = -std::log(boost::math::tgamma_delta_ratio(0.5 * nu, 0.5)) -
                     0.5 * std::log(nu * M_PI);
    auto log_f = [nu, c](double t) {
        return c - 0.5 * (nu + 1.0) * std::log1p(t * t / nu);
    };
    if (nu >= 100.0) {
        // integrand f (log f - log phi_std): relative accuracy survives the
        // mild cancellation with the moment terms at very large nu
        const double delta =
            2.0 * quad::integrate(
                      [&](double t) {
                          const double lf = log_f(t);
                          return std::exp(lf) * (lf + 0.5 * (kLog2Pi + t * t));
                      },
                      0.0, kInf, 1e-16, 1e-13);
        const double kld = delta - 1.0 / (nu - 2.0) - 0.5 * std::log(s2);
        return std::max(kld, 0.0);
    }
    // entropy route: f log f has a fast t^{-(nu+1)} log t tail even as nu -> 2,
    // and the Gaussian cross term is (log 2 pi)/2 + 1/2 exactly
    const double neg_entropy =
        2.0 * quad::integrate([&](double t) { const double lf = log_f(t);
                                              return std::exp(lf) * lf; },
                              0.0, kInf, 1e-13, 1e-11);
    return neg_entropy - 0.5 * std::log(s2) + 0.5 * kLog2Pi + 0.5;
}

StudentTDistance::StudentTDistance() {
    auto impl = std::make_shared<Impl>();
    constexpr int kNodes = 400;
    impl->nu_lo = 2.0 + 1e-6;
    impl->nu_hi = 1e6;
    const double t_lo = std::log(impl->nu_lo - 2.0);
    const double t_hi = std::log(impl->nu_hi - 2.0);
    std::vector<double> t(kNodes), d(kNodes);
    for (int i = 0; i < kNodes; ++i) {
        t[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (kNodes - 1);
        const double nu = 2.0 + std::exp(t[i]);
        d[i] = std::sqrt(2.0 * kld_quadrature(nu));
    }
    impl->d_at_lo = d.front();
    impl->d_at_hi = d.back();
    // Below the table: KLD = a - (1/2) log((nu-2)/nu) + o(1); pin a at the
    // lowest node so the continuation is continuous.
    impl->kld_lo_offset =
        0.5 * d.front() * d.front() + 0.5 * std::log((impl->nu_lo - 2.0) / impl->nu_lo);
    impl->curve = MonotoneCubic(std::move(t), std::move(d));
    impl_ = std::move(impl);
    nu_lo_ = impl_->nu_lo;
    nu_hi_ = impl_->nu_hi;
}

double StudentTDistance::operator()(double nu) const {
    if (!(nu > 2.0)) throw std::domain_error("StudentTDistance: nu must exceed 2");
    if (nu > impl_->nu_hi) return kSqrtThreeHalves / nu;
    if (nu < impl_->nu_lo) {
        const double kld = impl_->kld_lo_offset - 0.5 * std::log((nu - 2.0) / nu);
        return std::sqrt(2.0 * kld);
    }
    return impl_->curve(std::log(nu - 2.0));
}

double StudentTDistance::derivative_abs(double nu) const {
    if (!(nu > 2.0)) throw std::domain_error("StudentTDistance: nu must exceed 2");
    if (nu > impl_->nu_hi) return kSqrtThreeHalves / (nu * nu);
    if (nu < impl_->nu_lo) {
        const double d = (*this)(nu);
        return 0.5 * (1.0 / (nu - 2.0) - 1.0 / nu) / d;
    }
    return std::abs(impl_->curve.derivative(std::log(nu - 2.0))) / (nu - 2.0);
}

DistanceFunction StudentTDistance::as_distance() const {
    auto self = *this;  // copies the shared impl
    return DistanceFunction([self](double nu) { return nu <= 2.0 ? kInf : self(nu); },
                            Interval{2.0, kInf}, kInf,
                            [self](double nu) { return nu <= 2.0 ? kInf : self.derivative_abs(nu); });
}

std::shared_ptr<const StudentTDistance> StudentTDistance::shared() {
    static std::shared_ptr<const StudentTDistance> instance = [] {
        return std::make_shared<const StudentTDistance>();
    }();
    return instance;
}

StudentTPrior::StudentTPrior(double rate, std::shared_ptr<const StudentTDistance> distance)
    : rate_(rate), distance_(distance ? std::move(distance) : StudentTDistance::shared()) {
    if (!(rate > 0.0)) throw std::domain_error("StudentTPrior: rate must be positive");
}

StudentTPrior StudentTPrior::calibrate(double u, double alpha) {
    if (!(u > 2.0) || !(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("StudentTPrior::calibrate: need u > 2 and alpha in (0,1)");
    auto dist = StudentTDistance::shared();
    return StudentTPrior(-std::log(alpha) / (*dist)(u), dist);
}

double StudentTPrior::density(double nu) const {
    if (!(nu > 2.0)) throw std::domain_error("StudentTPrior::density: nu must exceed 2");
    const double d = (*distance_)(nu);
    return rate_ * std::exp(-rate_ * d) * distance_->derivative_abs(nu);
}

// ---------------------------------------------------------------------------
// AR(1)

namespace {

// -log(1 - rho^2) split into factors that stay accurate next to |rho| = 1
double ar1_neg_log_one_minus_sq(double rho) {
    return -(std::log1p(-rho) + std::log1p(rho));
}

double ar1_distance_zero(double rho) { return std::sqrt(ar1_neg_log_one_minus_sq(rho)); }

double ar1_distance_one(double rho) { return std::sqrt(1.0 - rho); }

}  // namespace

Ar1Prior::Ar1Prior(double rate, Ar1Base base) : rate_(rate), base_(base) {
    if (!(rate > 0.0)) throw std::domain_error("Ar1Prior: rate must be positive");
}

Ar1Prior Ar1Prior::calibrate(Ar1Base base, double u, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("Ar1Prior::calibrate: alpha must lie in (0,1)");
    if (base == Ar1Base::rho_zero) {
        if (!(u > 0.0 && u < 1.0))
            throw std::domain_error("Ar1Prior::calibrate: base 0 needs u in (0,1)");
        return Ar1Prior(-std::log(alpha) / std::sqrt(-std::log1p(-u * u)), base);
    }
    if (!(u < 1.0)) throw std::domain_error("Ar1Prior::calibrate: base 1 needs u < 1");
    const double floor = std::sqrt((1.0 - u) / 2.0);
    if (!(alpha > floor)) {
        throw FeasibilityError("Ar1Prior::calibrate: alpha below the attainable lower limit", floor,
                               1.0);
    }
    const double t = std::sqrt(1.0 - u);
    const double root2 = std::sqrt(2.0);
    auto tail = [&](double theta) {
        return std::expm1(-theta * t) / std::expm1(-theta * root2) - alpha;
    };
    const double log_theta = bisect([&](double s) { return tail(std::exp(s)); }, std::log(1e-8),
                                    std::log(1e8), 1e-12, 1e-13);
    return Ar1Prior(std::exp(log_theta), base);
}

double Ar1Prior::density(double rho) const {
    if (base_ == Ar1Base::rho_zero) {
        if (!(rho > -1.0 && rho < 1.0))
            throw std::domain_error("Ar1Prior::density: rho outside (-1,1)");
        if (std::abs(rho) < 1e-8) {
            // removable singularity: |rho| / ((1-rho^2) d(rho)) -> 1
            return 0.5 * rate_;
        }
        const double d = ar1_distance_zero(rho);
        if (!std::isfinite(d)) return 0.0;  // support edge beyond double resolution
        const double one_minus_sq = (1.0 - rho) * (1.0 + rho);
        return 0.5 * rate_ * std::exp(-rate_ * d) * std::abs(rho) / (one_minus_sq * d);
    }
    if (!(rho < 1.0)) throw std::domain_error("Ar1Prior::density: rho must be below 1");
    if (rho < -1.0) throw std::domain_error("Ar1Prior::density: rho outside [-1,1)");
    const double d = ar1_distance_one(rho);
    const double norm = -std::expm1(-std::sqrt(2.0) * rate_);
    return rate_ * std::exp(-rate_ * d) / (norm * 2.0 * d);
}

double Ar1Prior::sample(Rng& rng) const {
    if (base_ == Ar1Base::rho_zero) {
        const double d = rng.exponential(rate_);
        const double mag = std::sqrt(-std::expm1(-d * d));
        return rng.uniform() < 0.5 ? -mag : mag;
    }
    const double cap = -std::expm1(-rate_ * std::sqrt(2.0));
    const double d = -std::log1p(-rng.uniform() * cap) / rate_;
    return 1.0 - d * d;
}

DistanceFunction Ar1Prior::distance() const {
    if (base_ == Ar1Base::rho_zero) {
        return DistanceFunction(
            [](double rho) { return ar1_distance_zero(rho); }, Interval{-1.0, 1.0},
            {{-1.0, 0.0}, {0.0, 1.0}}, kInf,
            [](double rho) {
                if (std::abs(rho) < 1e-8) return 1.0;
                return rho / ((1.0 - rho) * (1.0 + rho) * ar1_distance_zero(rho));
            });
    }
    return DistanceFunction([](double rho) { return ar1_distance_one(rho); }, Interval{-1.0, 1.0},
                            std::sqrt(2.0),
                            [](double rho) { return -0.5 / ar1_distance_one(rho); });
}

// ---------------------------------------------------------------------------
// exchangeable correlation

namespace {

// log of det R for the m x m exchangeable correlation matrix
double exch_log_f(double rho, int m) {
    return std::log1p((m - 1.0) * rho) + (m - 1.0) * std::log1p(-rho);
}

}  // namespace

ExchangeableCorrPrior::ExchangeableCorrPrior(double rate, int block_size)
    : rate_(rate), m_(block_size) {
    if (!(rate > 0.0)) throw std::domain_error("ExchangeableCorrPrior: rate must be positive");
    if (block_size < 2) throw std::domain_error("ExchangeableCorrPrior: block size must be >= 2");
}

double ExchangeableCorrPrior::distance_at(double rho) const {
    if (!(rho > support_lo() && rho < 1.0))
        throw std::domain_error("ExchangeableCorrPrior: rho outside support");
    return std::sqrt(-exch_log_f(rho, m_));
}

double ExchangeableCorrPrior::density(double rho) const {
    if (!(rho > support_lo() && rho < 1.0))
        throw std::domain_error("ExchangeableCorrPrior: rho outside support");
    const double half_slope = std::sqrt(m_ * (m_ - 1.0) / 2.0);
    // near the base the Jacobian tends to sqrt(m(m-1)/2) on both sides
    if (std::abs(rho) < 1e-8) return 0.5 * rate_ * half_slope;
    const double d = distance_at(rho);
    if (!std::isfinite(d)) return 0.0;  // support edge beyond double resolution
    // d d/d rho = m(m-1) rho (1-rho)^{m-2} / (2 d f)
    const double f = std::exp(exch_log_f(rho, m_));
    const double jac = m_ * (m_ - 1.0) * std::abs(rho) * std::pow(1.0 - rho, m_ - 2.0) / (2.0 * d * f);
    return 0.5 * rate_ * std::exp(-rate_ * d) * jac;
}

double ExchangeableCorrPrior::sample(Rng& rng) const {
    const double d = rng.exponential(rate_);
    const bool negative = rng.uniform() < 0.5;
    const double target = -d * d;  // log f at the drawn distance
    const double lo = negative ? support_lo() : 0.0;
    const double hi = negative ? 0.0 : 1.0;
    // log f is monotone on the branch; bisect inside the open interval
    double a = lo + 1e-15 * (hi - lo), c = hi - 1e-15 * (hi - lo);
    if (exch_log_f(negative ? a : c, m_) > target) return negative ? a : c;  // saturated edge
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + c);
        const double v = exch_log_f(mid, m_) - target;
        const bool too_far = v < 0.0;  // farther from base than requested
        if ((c - a) < 1e-15) return mid;
        if (negative) {
            (too_far ? a : c) = mid;
        } else {
            (too_far ? c : a) = mid;
        }
    }
    return 0.5 * (a + c);
}

DistanceFunction ExchangeableCorrPrior::distance() const {
    const int m = m_;
    const double lo = support_lo();
    return DistanceFunction(
        [m](double rho) { return std::sqrt(-exch_log_f(rho, m)); }, Interval{lo, 1.0},
        {{lo, 0.0}, {0.0, 1.0}}, kInf,
        [m](double rho) {
            if (std::abs(rho) < 1e-8) return std::sqrt(m * (m - 1.0) / 2.0);
            const double d = std::sqrt(-exch_log_f(rho, m));
            const double f = std::exp(exch_log_f(rho, m));
            return m * (m - 1.0) * rho * std::pow(1.0 - rho, m - 2.0) / (2.0 * d * f);
        });
}

}  // namespace pcp
