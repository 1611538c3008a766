#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcp/rng.hpp"

namespace pcp {

// Change of variables from a density on the standard deviation sigma to the
// shrinkage coordinate kappa = (1 + sigma^2)^{-1}.
double shrinkage_density(const std::function<double(double)>& sigma_density, double kappa);

// E[kappa | y] for the normal means model, by adaptive quadrature over sigma.
double posterior_mean_shrinkage(const std::function<double(double)>& sigma_density,
                                double y_squared_norm, int p);

struct RiskPoint {
    double x0_norm = 0.0;
    double risk = 0.0;
    double se = 0.0;
};

// Monte Carlo mean-square risk of the posterior-mean estimator under the
// given sigma prior; the signal is placed on the first axis (the model and
// all priors here are spherically symmetric).
RiskPoint normal_means_risk(const std::function<double(double)>& sigma_density, double x0_norm,
                            int p, int replicates, std::uint64_t seed);

enum class TailFamily { exponential, half_cauchy };

// Prob(|beta| > delta) for beta | sigma ~ N(0, sigma^2) with sigma drawn
// from the family at the given rate (half-Cauchy scale is 1/rate).
double delta_sparsity_prob(double rate, double delta, TailFamily family);

// Rate making the prior delta_p-sparsity (delta_p = 1/p) match s0/p.
// Saturates at the lower search bound when no shrinkage is demanded.
double oracle_lambda(int p, int s0, TailFamily family);

// Log-spaced evaluation grid for the Student-t dof posterior.
struct NuGrid {
    std::vector<double> nodes;
    static NuGrid log_spaced(double lo = 2.01, double hi = 1e5, int n = 200);
};

struct PosteriorGrid {
    std::vector<double> nu;
    std::vector<double> density;  // trapezoid-normalised

    double quantile(double q) const;
    double mass_below(double x) const;
};

// Posterior over the dof grid for data y_i from the unit-variance Student-t,
// given a log prior density on nu.
PosteriorGrid student_t_posterior(std::span<const double> data,
                                  const std::function<double(double)>& log_prior,
                                  const NuGrid& grid);

struct NuPriorSpec {
    enum class Kind { pc, exponential, uniform };
    Kind kind = Kind::pc;
    double u = 10.0;      // pc: Prob(nu < u) = alpha
    double alpha = 0.5;
    double mean = 5.0;    // exponential on nu - 2
    double upper = 100.0; // uniform on (2, upper)

    std::function<double(double)> log_density() const;
};

struct SimulationScenario {
    int sample_size = 1000;
    double nu_true = 5.0;  // +inf means Gaussian data
    NuPriorSpec prior;
    int replicates = 100;
    NuGrid grid = NuGrid::log_spaced();
};

struct SimulationResult {
    double mixture_q025 = 0.0;
    double mixture_q50 = 0.0;
    double mixture_q975 = 0.0;
    double coverage = 0.0;  // fraction of central 95% intervals containing nu_true
};

SimulationResult simulation_study(const SimulationScenario& scenario, std::uint64_t seed);

}  // namespace pcp
