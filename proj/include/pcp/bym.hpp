#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcp/distance.hpp"
#include "pcp/multivariate.hpp"
#include "pcp/rng.hpp"

namespace pcp {

// A (possibly singular) symmetric structure matrix with its
// eigendecomposition, generalized-inverse spectrum and scaling state.
struct StructureModel {
    Eigen::MatrixXd matrix;              // R, scaled when `scaled` is set
    Eigen::MatrixXd eigenvectors;        // columns
    Eigen::VectorXd eigenvalues;         // gamma_i >= 0
    Eigen::VectorXd ginv_eigenvalues;    // 1/gamma_i, or 0 on the null space
    Eigen::MatrixXd null_space;          // V, columns spanning ker R (may be empty)
    double rank_tol = 1e-10;
    bool scaled = false;

    int dim() const { return static_cast<int>(matrix.rows()); }
    int null_dim() const { return static_cast<int>(null_space.cols()); }
};

// Eigendecomposes R and rescales it so the geometric mean of the marginal
// variances of the null-space-constrained field equals one. Eigenvalues
// below rank_tol * max are treated as exact zeros; anything materially
// negative is rejected.
StructureModel scale_structure(const Eigen::MatrixXd& R, double rank_tol = 1e-10);

// Plain-text ingestion: header "n <dim>" followed by "i j value" triplets
// (0-based; symmetric entries may be given once).
Eigen::MatrixXd read_structure_file(const std::string& path);

// Edge list "i j" per line; builds the intrinsic CAR structure R_ii = degree,
// R_ij = -1 for neighbours.
Eigen::MatrixXd read_graph_file(const std::string& path);

// d(phi) for the spatial/unstructured mixture with scaled structure R:
// d^2 = n phi (mean(gamma~) - 1) - sum log(1 - phi + phi gamma~_i).
// Infinite at phi = 1 when R is singular.
double bym_distance(const StructureModel& model, double phi);

// Truncated-exponential prior for the mixing fraction, distance tabulated on
// a 2001-point grid with monotone interpolation on each side of the base.
class MixingPrior {
public:
    MixingPrior(const StructureModel& model, double rate);  // base phi0 = 0

    // generalized form with an arbitrary distance curve and interior base
    MixingPrior(std::function<double(double)> distance_fn, double base_point, double rate);

    double rate() const { return rate_; }
    double base_point() const { return base_; }
    double distance(double phi) const;
    double d_at_one() const;
    double density(double phi) const;
    double cdf(double phi) const;  // Prob(mixing < phi)
    double sample(Rng& rng) const;

private:
    double rate_;
    double base_;
    PcPrior1d prior_;
};

// Rate lambda with Prob(phi < u) = alpha; requires alpha > d(u)/d(1).
double bym_calibrate(const StructureModel& model, double u, double alpha);

// Two-covariance mixture Sigma(phi) = (1-phi) S1 + phi S2 with an interior
// base Sigma(phi0). Determinants go through the matrix determinant lemma
// when S2 - S1 is low rank; the dense path stays available as a
// cross-check.
class GeneralizedMixing {
public:
    GeneralizedMixing(Eigen::MatrixXd s1, Eigen::MatrixXd s2, double base_point = 0.5);

    double base_point() const { return base_; }
    int delta_rank() const { return delta_rank_; }

    double distance(double phi) const;
    double dense_logdet(double phi) const;
    double lemma_logdet(double phi) const;

private:
    Eigen::MatrixXd s1_, s2_, base_cov_;
    Eigen::LLT<Eigen::MatrixXd> base_llt_;
    double base_logdet_;
    double base_;
    int delta_rank_;
    Eigen::MatrixXd delta_factor_;      // U with S2 - S1 = U diag(sign) U^T
    Eigen::VectorXd delta_signs_;
    Eigen::MatrixXd lemma_core_;        // U^T Sigma0^{-1} U
};

// Joint prior over the variance weights of an additive model, expressed in
// log-ratio coordinates wt_i = log(w_i / w_n). Built from the per-component
// covariance contributions by a numeric Hessian of the divergence at the
// equal-weight base.
class WeightsPcPrior {
public:
    WeightsPcPrior(std::vector<Eigen::MatrixXd> component_covariances, double rate);

    int components() const { return n_; }
    const SpherePcPrior& logratio_prior() const { return prior_; }
    const Eigen::MatrixXd& hessian() const { return hessian_; }

    double kld(const Eigen::VectorXd& logratio) const;
    Eigen::VectorXd kld_gradient_at_base() const;

    double density_logratio(const Eigen::VectorXd& logratio) const;
    Eigen::VectorXd sample_logratio(Rng& rng) const;
    Eigen::VectorXd sample_weights(Rng& rng) const;

    static Eigen::VectorXd weights_from_logratio(const Eigen::VectorXd& logratio);
    static Eigen::VectorXd logratio_from_weights(const Eigen::VectorXd& weights);

private:
    Eigen::MatrixXd mixture_cov(const Eigen::VectorXd& logratio) const;

    std::vector<Eigen::MatrixXd> covs_;
    int n_;
    Eigen::MatrixXd base_cov_;
    Eigen::MatrixXd hessian_;
    SpherePcPrior prior_;
};

}  // namespace pcp
