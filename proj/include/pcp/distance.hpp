#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "pcp/common.hpp"
#include "pcp/rng.hpp"

namespace pcp {

// Map from a flexibility parameter xi to the complexity distance d(xi) >= 0,
// with d = 0 at the base model. The support splits into branches on which d
// is strictly monotone; symmetric distances (lag-one correlation, block
// correlation) have two, everything else one.
class DistanceFunction {
public:
    using Map = std::function<double(double)>;

    struct Branch {
        double lo;
        double hi;
    };

    // Single monotone branch covering the support.
    DistanceFunction(Map evaluate, Interval support, double d_max, Map derivative = {});

    DistanceFunction(Map evaluate, Interval support, std::vector<Branch> branches, double d_max,
                     Map derivative = {});

    double operator()(double xi) const;

    // |d d(xi)/d xi|; central finite difference with relative step
    // max(1e-6 |xi|, 1e-8) when no analytic derivative was supplied,
    // one-sided at support boundaries.
    double derivative_abs(double xi) const;

    const Interval& support() const { return support_; }
    const std::vector<Branch>& branches() const { return branches_; }
    double d_max() const { return d_max_; }

    // Largest distance attained on a branch (at one of its endpoints).
    double branch_d_max(std::size_t b) const;

    // Solves d(xi) = target on branch b by bisection.
    double invert_on_branch(std::size_t b, double target) const;

    // Throws NumericalError when probing finds the distance non-monotone on
    // the branch (a missing branch decomposition).
    void verify_branch_monotone(std::size_t b) const;

    std::size_t branch_of(double xi) const;

private:
    Map evaluate_;
    Map derivative_;
    Interval support_;
    std::vector<Branch> branches_;
    double d_max_;
};

// User statement Prob(Q(xi) > U) = alpha (or the lower-tail analogue) that
// pins down the penalisation rate. Q must be monotone on each branch of the
// distance it is paired with.
struct TailCondition {
    enum class Direction { upper, lower };

    std::function<double(double)> transform;  // Q
    double bound = 0.0;                       // U
    double mass = 0.0;                        // alpha in (0,1)
    Direction direction = Direction::upper;
};

// Univariate PC prior: exponential with the given rate on the distance
// scale, truncated when the distance is bounded, uniform across branches
// alive at a given distance.
class PcPrior1d {
public:
    PcPrior1d(double rate, DistanceFunction distance);

    double rate() const { return rate_; }
    bool truncated() const { return truncated_; }
    double normalizer() const { return normalizer_; }
    const DistanceFunction& distance() const { return distance_; }

    double density(double xi) const;

    // Prior mass of the tail event, exact on the distance scale.
    double tail_probability(const TailCondition& tail) const;

    double sample(Rng& rng) const;

private:
    // Count of branches whose distance range reaches d.
    int alive(double d) const;
    // Exponential mass of [d_lo, d_hi] weighted by 1/alive, normalised.
    double level_mass(double d_lo, double d_hi) const;
    // Distance at a support edge; singular edges map to +inf.
    double edge_distance(double x) const;

    double rate_;
    DistanceFunction distance_;
    bool truncated_;
    double normalizer_;
};

// KLD of the flexible Gaussian N(mean1, cov1) from the base N(mean0, cov0).
double kld_gaussian(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                    const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1);

// d = sqrt(2 KLD)
double distance_from_kld(double kld);

// pi(xi) = rate * exp(-rate d(xi)) |d d/d xi|, truncation and branch weights
// included.
double pc_density(const PcPrior1d& prior, double xi);

// Pushes an arbitrary proper density on xi through the distance map,
// summing contributions across branches, and tabulates it on d_grid.
std::vector<std::pair<double, double>> prior_on_distance_scale(
    const std::function<double(double)>& density_xi, const DistanceFunction& distance,
    const std::vector<double>& d_grid);

// Rate lambda satisfying the tail statement; bisection on log-rate over
// [1e-8, 1e8] to a 1e-10 probability residual. Throws FeasibilityError with
// the attainable mass range when no rate works.
double calibrate_rate(const DistanceFunction& distance, const TailCondition& tail);

}  // namespace pcp
