#include "pcp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pcp/common.hpp"
#include "pcp/parallel.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/roots.hpp"
#include "pcp/stats.hpp"
#include "pcp/univariate.hpp"

namespace pcp {

double shrinkage_density(const std::function<double(double)>& sigma_density, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::domain_error("shrinkage_density: kappa must lie in (0,1)");
    const double sigma = std::sqrt(1.0 / kappa - 1.0);
    const double jac = 0.5 / std::sqrt(kappa * kappa * kappa * (1.0 - kappa));
    return sigma_density(sigma) * jac;
}

double posterior_mean_shrinkage(const std::function<double(double)>& sigma_density,
                                double y_squared_norm, int p) {
    // marginal likelihood factor (1+s^2)^{-p/2} exp(-S / (2 (1+s^2)))
    auto weight = [&](double s, double extra) {
        const double v = 1.0 + s * s;
        return std::pow(v, -0.5 * p - extra) * std::exp(-0.5 * y_squared_norm / v) *
               sigma_density(s);
    };
    const double num = quad::integrate([&](double s) { return weight(s, 1.0); }, 0.0, kInf);
    const double den = quad::integrate([&](double s) { return weight(s, 0.0); }, 0.0, kInf);
    if (!(den > 0.0) || !std::isfinite(num / den))
        throw NumericalError("posterior_mean_shrinkage: quadrature failure");
    return num / den;
}

RiskPoint normal_means_risk(const std::function<double(double)>& sigma_density, double x0_norm,
                            int p, int replicates, std::uint64_t seed) {
    if (p < 1 || replicates < 100)
        throw std::domain_error("normal_means_risk: need p >= 1 and replicates >= 100");
    std::vector<double> losses(replicates);
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
        Rng rng = Rng::substream(seed, r);
        double sq = 0.0;
        std::vector<double> y(p);
        for (int i = 0; i < p; ++i) {
            const double x0 = (i == 0) ? x0_norm : 0.0;
            y[i] = x0 + rng.normal();
            sq += y[i] * y[i];
        }
        const double shrink = 1.0 - posterior_mean_shrinkage(sigma_density, sq, p);
        double loss = 0.0;
        for (int i = 0; i < p; ++i) {
            const double x0 = (i == 0) ? x0_norm : 0.0;
            const double e = x0 - y[i] * shrink;
            loss += e * e;
        }
        losses[r] = loss;
    });
    return {x0_norm, stats::mean(losses), stats::standard_error(losses)};
}

double delta_sparsity_prob(double rate, double delta, TailFamily family) {
    // Substituting sigma = t / rate keeps the integrand well scaled for any
    // rate; the inner Gaussian tail is exact (erfc).
    auto normal_tail_two_sided = [](double z) { return std::erfc(z / std::sqrt(2.0)); };
    if (family == TailFamily::exponential) {
        return quad::integrate(
            [&](double t) { return std::exp(-t) * normal_tail_two_sided(delta * rate / t); }, 0.0,
            kInf);
    }
    return quad::integrate(
        [&](double t) {
            return (2.0 / M_PI) / (1.0 + t * t) * normal_tail_two_sided(delta * rate / t);
        },
        0.0, kInf);
}

double oracle_lambda(int p, int s0, TailFamily family) {
    if (p < 1 || s0 < 1 || s0 > p) throw std::domain_error("oracle_lambda: need 1 <= s0 <= p");
    const double target = static_cast<double>(s0) / p;
    const double delta = 1.0 / p;
    const double rate_lo = 1e-8, rate_hi = 1e10;
    const double p_max = delta_sparsity_prob(rate_lo, delta, family);
    const double p_min = delta_sparsity_prob(rate_hi, delta, family);
    if (target >= p_max) return rate_lo;  // no shrinkage demanded
    if (target <= p_min) {
        throw FeasibilityError("oracle_lambda: target sparsity unattainable", p_min, p_max);
    }
    const double log_rate = bisect(
        [&](double t) { return delta_sparsity_prob(std::exp(t), delta, family) - target; },
        std::log(rate_lo), std::log(rate_hi), 1e-12, 1e-12);
    return std::exp(log_rate);
}

// ---------------------------------------------------------------------------
// Student-t posterior machinery

NuGrid NuGrid::log_spaced(double lo, double hi, int n) {
    if (!(lo > 2.0) || !(hi > lo) || n < 2) throw std::domain_error("NuGrid: bad parameters");
    NuGrid g;
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
    }
    return g;
}

double PosteriorGrid::mass_below(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nu.size(); ++i) {
        if (x <= nu[i]) break;
        const double hi = std::min(x, nu[i + 1]);
        const double frac = (hi - nu[i]) / (nu[i + 1] - nu[i]);
        const double dens_hi = density[i] + frac * (density[i + 1] - density[i]);
        acc += 0.5 * (density[i] + dens_hi) * (hi - nu[i]);
    }
    return acc;
}

double PosteriorGrid::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("PosteriorGrid::quantile: q outside [0,1]");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nu.size(); ++i) {
        const double h = nu[i + 1] - nu[i];
        const double cell = 0.5 * (density[i] + density[i + 1]) * h;
        if (acc + cell >= q || i + 2 == nu.size()) {
            // invert the trapezoid model inside the cell: the mass up to
            // offset u solves a u^2/2 + rho_i u = q - acc
            const double need = std::clamp(q - acc, 0.0, cell);
            const double slope = (density[i + 1] - density[i]) / h;
            double u;
            if (std::abs(slope) * h < 1e-12 * std::max(density[i], 1e-300)) {
                u = need / std::max(density[i], 1e-300);
            } else {
                const double disc = density[i] * density[i] + 2.0 * slope * need;
                u = (-density[i] + std::sqrt(std::max(disc, 0.0))) / slope;
            }
            return nu[i] + std::clamp(u, 0.0, h);
        }
        acc += cell;
    }
    return nu.back();
}

PosteriorGrid student_t_posterior(std::span<const double> data,
                                  const std::function<double(double)>& log_prior,
                                  const NuGrid& grid) {
    const std::size_t m = grid.nodes.size();
    if (m < 2) throw std::domain_error("student_t_posterior: grid too small");
    std::vector<double> log_post(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double nu = grid.nodes[j];
        const double s2 = (nu - 2.0) / nu;
        const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * M_PI) - 0.5 * std::log(s2);
        double acc = 0.0;
        for (double y : data) acc += -0.5 * (nu + 1.0) * std::log1p(y * y / (s2 * nu));
        log_post[j] = static_cast<double>(data.size()) * c + acc + log_prior(nu);
    }
    const double top = *std::max_element(log_post.begin(), log_post.end());
    if (!std::isfinite(top)) throw NumericalError("student_t_posterior: vanishing posterior");
    PosteriorGrid out;
    out.nu = grid.nodes;
    out.density.resize(m);
    for (std::size_t j = 0; j < m; ++j) out.density[j] = std::exp(log_post[j] - top);
    double mass = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        mass += 0.5 * (out.density[j] + out.density[j + 1]) * (out.nu[j + 1] - out.nu[j]);
    }
    for (double& v : out.density) v /= mass;
    return out;
}

std::function<double(double)> NuPriorSpec::log_density() const {
    switch (kind) {
        case Kind::pc: {
            const StudentTPrior prior = StudentTPrior::calibrate(u, alpha);
            return [prior](double nu) { return std::log(prior.density(nu)); };
        }
        case Kind::exponential: {
            const double rate = 1.0 / mean;
            return [rate](double nu) { return std::log(rate) - rate * (nu - 2.0); };
        }
        case Kind::uniform: {
            const double hi = upper;
            return [hi](double nu) {
                return nu <= hi ? -std::log(hi - 2.0) : -kInf;
            };
        }
    }
    throw std::logic_error("NuPriorSpec: unknown kind");
}

SimulationResult simulation_study(const SimulationScenario& scenario, std::uint64_t seed) {
    if (scenario.replicates < 50)
        throw std::domain_error("simulation_study: need at least 50 replicates");
    const auto log_prior = scenario.prior.log_density();
    const std::size_t m = scenario.grid.nodes.size();
    const int reps = scenario.replicates;
    std::vector<double> mixture(m, 0.0);
    std::vector<int> covered(reps, 0);
    std::vector<std::vector<double>> densities(reps);

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Rng rng = Rng::substream(seed, r);
        std::vector<double> y(scenario.sample_size);
        for (double& v : y) {
            v = std::isinf(scenario.nu_true) ? rng.normal()
                                             : rng.student_t_unit_variance(scenario.nu_true);
        }
        const PosteriorGrid post = student_t_posterior(y, log_prior, scenario.grid);
        const double lo = post.quantile(0.025);
        const double hi = post.quantile(0.975);
        covered[r] = (lo <= scenario.nu_true && scenario.nu_true <= hi) ? 1 : 0;
        densities[r] = post.density;
    });

    for (int r = 0; r < reps; ++r) {
        for (std::size_t j = 0; j < m; ++j) mixture[j] += densities[r][j] / reps;
    }
    PosteriorGrid mix;
    mix.nu = scenario.grid.nodes;
    mix.density = std::move(mixture);
    SimulationResult out;
    out.mixture_q025 = mix.quantile(0.025);
    out.mixture_q50 = mix.quantile(0.5);
    out.mixture_q975 = mix.quantile(0.975);
    int cov = 0;
    for (int c : covered) cov += c;
    out.coverage = std::isinf(scenario.nu_true) ? 0.0 : static_cast<double>(cov) / reps;
    return out;
}

}  // namespace pcp
