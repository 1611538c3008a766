#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pcp/common.hpp"
#include "pcp/rng.hpp"

namespace pcp {

// Scalar link h between the level-set coordinate and the distance,
// increasing with h(0) = 0.
struct RadialMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> inverse;

    static RadialMap sqrt_two_a();  // h(a) = sqrt(2a)
    static RadialMap sqrt_a();      // h(a) = sqrt(a)
    static RadialMap identity();
};

// PC prior whose level sets are scaled simplexes: d(xi) = h(b^T xi) on
// xi >= 0 with b > 0. Exponential in the distance, uniform on each simplex.
class SimplexPcPrior {
public:
    SimplexPcPrior(double rate, int dim, RadialMap h = RadialMap::sqrt_two_a(),
                   Eigen::VectorXd weights = Eigen::VectorXd());

    double rate() const { return rate_; }
    int dim() const { return dim_; }

    double distance(const Eigen::VectorXd& xi) const;
    double density(const Eigen::VectorXd& xi) const;
    Eigen::VectorXd sample(Rng& rng) const;

private:
    double rate_;
    int dim_;
    RadialMap h_;
    Eigen::VectorXd b_;
    double log_b_prod_;
};

// PC prior whose level sets are ellipsoids: d(xi) = h(xi^T H xi / 2) with H
// symmetric positive definite.
class SpherePcPrior {
public:
    SpherePcPrior(double rate, int dim, RadialMap h = RadialMap::sqrt_two_a(),
                  Eigen::MatrixXd metric = Eigen::MatrixXd());

    double rate() const { return rate_; }
    int dim() const { return dim_; }
    const Eigen::MatrixXd& metric() const { return metric_; }

    double distance(const Eigen::VectorXd& xi) const;
    double density(const Eigen::VectorXd& xi) const;
    Eigen::VectorXd sample(Rng& rng) const;

private:
    double rate_;
    int dim_;
    RadialMap h_;
    Eigen::MatrixXd metric_, metric_sqrt_, metric_inv_sqrt_;
    double half_log_det_;
};

// Correlation matrix R = B B^T with B lower triangular, rows of unit norm,
// parameterised by angles theta_ij in [0, pi] for 2 <= i <= q, j < i.
struct CorrelationModel {
    int dim = 0;
    Eigen::VectorXd angles;    // p = q(q-1)/2 values, rows in order (2,1),(3,1),(3,2),...
    Eigen::MatrixXd cholesky;  // B
    Eigen::MatrixXd matrix;    // R
};

inline int correlation_angle_count(int q) { return q * (q - 1) / 2; }

CorrelationModel angles_to_correlation(int q, const Eigen::VectorXd& angles);

// Inverse map; requires R to be a valid correlation matrix with a positive
// definite Cholesky factor.
Eigen::VectorXd correlation_to_angles(const Eigen::MatrixXd& R);

// -log det R = 2 sum gamma_ij with gamma_ij = -log sin theta_ij
double correlation_distance(const Eigen::MatrixXd& R);

class CorrelationPcPrior {
public:
    CorrelationPcPrior(int q, double rate);

    int dim() const { return q_; }
    double rate() const { return rate_; }

    // density over the angle coordinates (both theta and pi - theta branches
    // carry mass; degenerate angles give 0)
    double density_angles(const Eigen::VectorXd& angles) const;

    // density with respect to the below-diagonal entries of R
    double density_matrix(const Eigen::MatrixXd& R) const;

    // order-summed exchangeable version, q <= 4 (q! permutations)
    double density_matrix_exchangeable(const Eigen::MatrixXd& R) const;

    CorrelationModel sample(Rng& rng, bool permute = false) const;

private:
    int q_;
    double rate_;
};

// Levinson-Durbin map between partial correlations (all |phi_i| < 1) and the
// AR coefficients / autocorrelations of a stationary process.
void levinson_durbin(const Eigen::VectorXd& partials, Eigen::VectorXd* ar_coefficients,
                     Eigen::VectorXd* autocorrelations);

Eigen::VectorXd partials_from_autocorrelations(const Eigen::VectorXd& autocorrelations);

// PC prior on the partial correlations of a stationary AR model with
// Toeplitz correlation structure; d(phi)^2 = -sum log(1 - phi_i^2).
class ToeplitzPcPrior {
public:
    ToeplitzPcPrior(int p, double rate);

    int dim() const { return p_; }
    double rate() const { return rate_; }

    double distance(const Eigen::VectorXd& phi) const;
    double density(const Eigen::VectorXd& phi) const;
    Eigen::VectorXd sample(Rng& rng) const;

private:
    int p_;
    double rate_;
};

}  // namespace pcp
