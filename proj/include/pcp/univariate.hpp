#pragma once

#include <memory>

#include "pcp/distance.hpp"
#include "pcp/rng.hpp"

namespace pcp {

// log density at y of the Student-t with dof nu rescaled to unit variance
// (valid for nu > 2).
double log_student_t_unit_variance(double y, double nu);

// PC prior for a Gaussian precision: exponential with the given rate on the
// standard deviation scale, a type-2 Gumbel on the precision itself.
class PrecisionPrior {
public:
    explicit PrecisionPrior(double rate);

    // Prob(1/sqrt(tau) > u) = alpha  =>  rate = -ln(alpha)/u
    static PrecisionPrior calibrate(double u, double alpha);

    double rate() const { return rate_; }
    double density(double tau) const;
    double sample(Rng& rng) const;  // tau = sigma^{-2}, sigma ~ Exp(rate)

    // d(tau) = tau^{-1/2}; exposed for pipeline equivalence checks.
    DistanceFunction distance() const;
    PcPrior1d generic() const { return PcPrior1d(rate_, distance()); }

private:
    double rate_;
};

// Distance from the Gaussian for the Student-t dof parameter, d(nu) =
// sqrt(2 KLD(t_nu^std || N(0,1))). Values come from adaptive quadrature of
// the log-density ratio, tabulated once on a log grid in nu-2 and
// interpolated monotonically; outside the table the curve continues with
// analytic expansions (sqrt(3/2)/nu for large nu, the log-variance blowup
// toward nu = 2).
class StudentTDistance {
public:
    StudentTDistance();

    double operator()(double nu) const;
    double derivative_abs(double nu) const;

    // One quadrature evaluation of the divergence itself (slow path).
    static double kld_quadrature(double nu);

    DistanceFunction as_distance() const;

    static std::shared_ptr<const StudentTDistance> shared();

    double table_lo() const { return nu_lo_; }
    double table_hi() const { return nu_hi_; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    double nu_lo_, nu_hi_;
};

class StudentTPrior {
public:
    StudentTPrior(double rate, std::shared_ptr<const StudentTDistance> distance = nullptr);

    // Prob(nu < u) = alpha  =>  rate = -log(alpha)/d(u)
    static StudentTPrior calibrate(double u, double alpha);

    double rate() const { return rate_; }
    double density(double nu) const;
    const StudentTDistance& distance() const { return *distance_; }
    PcPrior1d generic() const { return PcPrior1d(rate_, distance_->as_distance()); }

private:
    double rate_;
    std::shared_ptr<const StudentTDistance> distance_;
};

// Lag-one correlation of a unit-variance AR(1) process; the base model is
// either no dependence (rho = 0) or perfect dependence (rho = 1).
enum class Ar1Base { rho_zero, rho_one };

class Ar1Prior {
public:
    Ar1Prior(double rate, Ar1Base base);

    // base rho_zero: Prob(|rho| > u) = alpha, closed form.
    // base rho_one:  Prob(rho > u) = alpha by bisection; requires
    //                alpha > sqrt((1-u)/2).
    static Ar1Prior calibrate(Ar1Base base, double u, double alpha);

    double rate() const { return rate_; }
    Ar1Base base() const { return base_; }
    double density(double rho) const;
    double sample(Rng& rng) const;
    DistanceFunction distance() const;

private:
    double rate_;
    Ar1Base base_;
};

// Single correlation of an m x m exchangeable correlation matrix; positive
// definiteness restricts rho to (-1/(m-1), 1). The distance has one branch
// on each side of the base rho = 0 and the prior splits its mass evenly
// between them.
class ExchangeableCorrPrior {
public:
    ExchangeableCorrPrior(double rate, int block_size);

    double rate() const { return rate_; }
    int block_size() const { return m_; }
    double support_lo() const { return -1.0 / (m_ - 1); }
    double density(double rho) const;
    double distance_at(double rho) const;
    double sample(Rng& rng) const;
    DistanceFunction distance() const;

private:
    double rate_;
    int m_;
};

}  // namespace pcp
