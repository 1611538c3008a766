#include "pcp/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcp {

namespace {

double simplex_log_shell(int n, double r) {
    // log[(n-1)! / r^{n-1}]
    return std::lgamma(n) - (n - 1.0) * std::log(r);
}

double sphere_log_shell(int n, double r) {
    // log[Gamma(n/2+1) / (n pi^{n/2} r^{n-2})]
    return std::lgamma(0.5 * n + 1.0) - std::log(static_cast<double>(n)) -
           0.5 * n * std::log(M_PI) - (n - 2.0) * std::log(r);
}

}  // namespace

RadialMap RadialMap::sqrt_two_a() {
    return {[](double a) { return std::sqrt(2.0 * a); },
            [](double a) { return 1.0 / std::sqrt(2.0 * a); },
            [](double d) { return 0.5 * d * d; }};
}

RadialMap RadialMap::sqrt_a() {
    return {[](double a) { return std::sqrt(a); },
            [](double a) { return 0.5 / std::sqrt(a); },
            [](double d) { return d * d; }};
}

RadialMap RadialMap::identity() {
    return {[](double a) { return a; }, [](double) { return 1.0; },
            [](double d) { return d; }};
}

// ---------------------------------------------------------------------------
// simplex case

SimplexPcPrior::SimplexPcPrior(double rate, int dim, RadialMap h, Eigen::VectorXd weights)
    : rate_(rate), dim_(dim), h_(std::move(h)), b_(std::move(weights)) {
    if (!(rate > 0.0)) throw std::domain_error("SimplexPcPrior: rate must be positive");
    if (dim < 1) throw std::domain_error("SimplexPcPrior: dimension must be >= 1");
    if (b_.size() == 0) b_ = Eigen::VectorXd::Ones(dim);
    if (b_.size() != dim || (b_.array() <= 0.0).any())
        throw std::domain_error("SimplexPcPrior: weights must be positive and match dim");
    log_b_prod_ = b_.array().log().sum();
}

double SimplexPcPrior::distance(const Eigen::VectorXd& xi) const {
    if (xi.size() != dim_) throw std::invalid_argument("SimplexPcPrior: dimension mismatch");
    if ((xi.array() < 0.0).any())
        throw std::domain_error("SimplexPcPrior: xi must be componentwise nonnegative");
    return h_.value(b_.dot(xi));
}

double SimplexPcPrior::density(const Eigen::VectorXd& xi) const {
    if (xi.size() != dim_) throw std::invalid_argument("SimplexPcPrior: dimension mismatch");
    if ((xi.array() < 0.0).any())
        throw std::domain_error("SimplexPcPrior: xi must be componentwise nonnegative");
    const double r = b_.dot(xi);
    if (r <= 0.0) return dim_ == 1 ? rate_ * h_.derivative(0.0) * std::exp(log_b_prod_) : kInf;
    const double d = h_.value(r);
    const double log_dens = std::log(rate_) - rate_ * d + simplex_log_shell(dim_, r) +
                            std::log(std::abs(h_.derivative(r))) + log_b_prod_;
    return std::exp(log_dens);
}

Eigen::VectorXd SimplexPcPrior::sample(Rng& rng) const {
    const double d = rng.exponential(rate_);
    Eigen::VectorXd z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = rng.exponential(1.0);
    const double r = h_.inverse(d);
    return (r / z.sum()) * z.cwiseQuotient(b_);
}

// ---------------------------------------------------------------------------
// sphere case

SpherePcPrior::SpherePcPrior(double rate, int dim, RadialMap h, Eigen::MatrixXd metric)
    : rate_(rate), dim_(dim), h_(std::move(h)), metric_(std::move(metric)) {
    if (!(rate > 0.0)) throw std::domain_error("SpherePcPrior: rate must be positive");
    if (dim < 1) throw std::domain_error("SpherePcPrior: dimension must be >= 1");
    if (metric_.size() == 0) metric_ = Eigen::MatrixXd::Identity(dim, dim);
    if (metric_.rows() != dim || metric_.cols() != dim)
        throw std::invalid_argument("SpherePcPrior: metric dimension mismatch");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(metric_);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error("SpherePcPrior: metric must be symmetric positive definite");
    const Eigen::VectorXd sqrt_ev = eig.eigenvalues().cwiseSqrt();
    metric_sqrt_ = eig.eigenvectors() * sqrt_ev.asDiagonal() * eig.eigenvectors().transpose();
    metric_inv_sqrt_ =
        eig.eigenvectors() * sqrt_ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    half_log_det_ = 0.5 * eig.eigenvalues().array().log().sum();
}

double SpherePcPrior::distance(const Eigen::VectorXd& xi) const {
    if (xi.size() != dim_) throw std::invalid_argument("SpherePcPrior: dimension mismatch");
    return h_.value(0.5 * xi.dot(metric_ * xi));
}

double SpherePcPrior::density(const Eigen::VectorXd& xi) const {
    if (xi.size() != dim_) throw std::invalid_argument("SpherePcPrior: dimension mismatch");
    const double a = 0.5 * xi.dot(metric_ * xi);
    if (a <= 0.0) return dim_ <= 1 ? 0.5 * rate_ * std::exp(half_log_det_) : kInf;
    const double r = std::sqrt(2.0 * a);
    const double d = h_.value(a);
    const double log_dens = std::log(rate_) - rate_ * d + sphere_log_shell(dim_, r) +
                            std::log(std::abs(h_.derivative(a))) + half_log_det_;
    return std::exp(log_dens);
}

Eigen::VectorXd SpherePcPrior::sample(Rng& rng) const {
    const double d = rng.exponential(rate_);
    Eigen::VectorXd z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
    z.normalize();
    const double r = std::sqrt(2.0 * h_.inverse(d));
    return r * (metric_inv_sqrt_ * z);
}

// ---------------------------------------------------------------------------
// correlation matrices

CorrelationModel angles_to_correlation(int q, const Eigen::VectorXd& angles) {
    if (q < 2) throw std::domain_error("angles_to_correlation: q must be >= 2");
    if (angles.size() != correlation_angle_count(q))
        throw std::invalid_argument("angles_to_correlation: wrong number of angles");
    if ((angles.array() < 0.0).any() || (angles.array() > M_PI).any())
        throw std::domain_error("angles_to_correlation: angles must lie in [0, pi]");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(q, q);
    B(0, 0) = 1.0;
    int k = 0;
    for (int i = 1; i < q; ++i) {
        double sin_prod = 1.0;
        for (int j = 0; j < i; ++j) {
            const double th = angles[k++];
            B(i, j) = std::cos(th) * sin_prod;
            sin_prod *= std::sin(th);
        }
        B(i, i) = sin_prod;
    }
    CorrelationModel model;
    model.dim = q;
    model.angles = angles;
    model.cholesky = B;
    model.matrix = B * B.transpose();
    model.matrix.diagonal().setOnes();  // clear roundoff on the unit diagonal
    return model;
}

Eigen::VectorXd correlation_to_angles(const Eigen::MatrixXd& R) {
    const int q = static_cast<int>(R.rows());
    if (R.cols() != q || q < 2) throw std::invalid_argument("correlation_to_angles: bad matrix");
    const Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("correlation_to_angles: matrix not positive definite");
    const Eigen::MatrixXd B = llt.matrixL();
    Eigen::VectorXd angles(correlation_angle_count(q));
    int k = 0;
    for (int i = 1; i < q; ++i) {
        double sin_prod = 1.0;
        for (int j = 0; j < i; ++j) {
            const double c = std::clamp(B(i, j) / sin_prod, -1.0, 1.0);
            const double th = std::acos(c);
            angles[k++] = th;
            sin_prod *= std::sin(th);
            if (sin_prod <= 0.0) sin_prod = std::numeric_limits<double>::min();
        }
    }
    return angles;
}

double correlation_distance(const Eigen::MatrixXd& R) {
    const Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("correlation_distance: matrix not positive definite");
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < R.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return std::sqrt(std::max(0.0, -logdet));
}

CorrelationPcPrior::CorrelationPcPrior(int q, double rate) : q_(q), rate_(rate) {
    if (q < 2) throw std::domain_error("CorrelationPcPrior: q must be >= 2");
    if (!(rate > 0.0)) throw std::domain_error("CorrelationPcPrior: rate must be positive");
}

double CorrelationPcPrior::density_angles(const Eigen::VectorXd& angles) const {
    const int p = correlation_angle_count(q_);
    if (angles.size() != p) throw std::invalid_argument("CorrelationPcPrior: wrong angle count");
    if ((angles.array() < 0.0).any() || (angles.array() > M_PI).any())
        throw std::domain_error("CorrelationPcPrior: angles must lie in [0, pi]");
    double r = 0.0;            // sum of gamma_ij
    double log_jac = 0.0;      // sum log |cot theta|
    for (int k = 0; k < p; ++k) {
        const double s = std::sin(angles[k]);
        if (s <= 0.0) return 0.0;  // degenerate boundary
        r += -std::log(s);
        log_jac += std::log(std::abs(std::cos(angles[k]))) - std::log(s);
    }
    if (r <= 0.0) return p == 1 ? 0.5 * rate_ : kInf;  // base model point
    const double d = std::sqrt(2.0 * r);
    // simplex density in gamma (h(a) = sqrt(2a), b = 1), folded over the
    // theta / pi-theta branches
    const double log_dens = std::log(rate_) - rate_ * d + simplex_log_shell(p, r) -
                            0.5 * std::log(2.0 * r) + log_jac - p * std::log(2.0);
    return std::exp(log_dens);
}

namespace {

Eigen::VectorXd below_diagonal(const Eigen::MatrixXd& R) {
    const int q = static_cast<int>(R.rows());
    Eigen::VectorXd v(correlation_angle_count(q));
    int k = 0;
    for (int i = 1; i < q; ++i)
        for (int j = 0; j < i; ++j) v[k++] = R(i, j);
    return v;
}

}  // namespace

double CorrelationPcPrior::density_matrix(const Eigen::MatrixXd& R) const {
    const int p = correlation_angle_count(q_);
    const Eigen::VectorXd angles = correlation_to_angles(R);
    const double dens_theta = density_angles(angles);
    if (dens_theta == 0.0) return 0.0;
    // Jacobian of the angle -> correlation-entry map by forward differences.
    const Eigen::VectorXd base = below_diagonal(angles_to_correlation(q_, angles).matrix);
    Eigen::MatrixXd jac(p, p);
    const double step = 1e-7;
    for (int k = 0; k < p; ++k) {
        Eigen::VectorXd th = angles;
        const double h = (th[k] + step <= M_PI) ? step : -step;
        th[k] += h;
        jac.col(k) = (below_diagonal(angles_to_correlation(q_, th).matrix) - base) / h;
    }
    const double det = jac.fullPivLu().determinant();
    if (det == 0.0) return kInf;
    return dens_theta / std::abs(det);
}

double CorrelationPcPrior::density_matrix_exchangeable(const Eigen::MatrixXd& R) const {
    if (q_ > 4)
        throw std::domain_error("CorrelationPcPrior: order-summed density limited to q <= 4");
    std::vector<int> perm(q_);
    std::iota(perm.begin(), perm.end(), 0);
    double acc = 0.0;
    int count = 0;
    do {
        Eigen::MatrixXd Rp(q_, q_);
        for (int i = 0; i < q_; ++i)
            for (int j = 0; j < q_; ++j) Rp(i, j) = R(perm[i], perm[j]);
        acc += density_matrix(Rp);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc / count;
}

CorrelationModel CorrelationPcPrior::sample(Rng& rng, bool permute) const {
    const int p = correlation_angle_count(q_);
    const double d = rng.exponential(rate_);
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z[i] = rng.exponential(1.0);
    const Eigen::VectorXd gamma = (0.5 * d * d / z.sum()) * z;
    Eigen::VectorXd angles(p);
    for (int i = 0; i < p; ++i) {
        const double th = std::asin(std::exp(-gamma[i]));
        angles[i] = rng.uniform() < 0.5 ? M_PI - th : th;
    }
    CorrelationModel model = angles_to_correlation(q_, angles);
    if (permute) {
        std::vector<int> perm(q_);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = q_ - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform() * (i + 1));
            std::swap(perm[i], perm[std::min(j, i)]);
        }
        // Re-triangularise the permuted factor by QR; refactoring the (often
        // nearly singular) permuted matrix itself would lose the far tail.
        Eigen::MatrixXd pb(q_, q_);
        for (int i = 0; i < q_; ++i) pb.row(i) = model.cholesky.row(perm[i]);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(pb.transpose());
        Eigen::MatrixXd tri = qr.matrixQR().triangularView<Eigen::Upper>();
        Eigen::MatrixXd B = tri.transpose();
        for (int j = 0; j < q_; ++j) {
            if (B(j, j) < 0.0) B.col(j) = -B.col(j);
        }
        model.cholesky = B;
        model.matrix = B * B.transpose();
        model.matrix.diagonal().setOnes();
        int k = 0;
        model.angles.resize(correlation_angle_count(q_));
        for (int i = 1; i < q_; ++i) {
            double sin_prod = 1.0;
            for (int j = 0; j < i; ++j) {
                const double c = std::clamp(B(i, j) / sin_prod, -1.0, 1.0);
                const double th = std::acos(c);
                model.angles[k++] = th;
                sin_prod *= std::sin(th);
                if (sin_prod <= 0.0) sin_prod = std::numeric_limits<double>::min();
            }
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// Levinson-Durbin and Toeplitz

void levinson_durbin(const Eigen::VectorXd& partials, Eigen::VectorXd* ar_coefficients,
                     Eigen::VectorXd* autocorrelations) {
    const int p = static_cast<int>(partials.size());
    if (p < 1) throw std::invalid_argument("levinson_durbin: empty input");
    if ((partials.array().abs() >= 1.0).any())
        throw std::domain_error("levinson_durbin: partial correlations must lie in (-1,1)");
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);  // current AR coefficients
    Eigen::VectorXd s = Eigen::VectorXd::Zero(p);  // autocorrelations, s[k-1] = s_k
    a[0] = partials[0];
    s[0] = partials[0];
    for (int k = 2; k <= p; ++k) {
        const double phi = partials[k - 1];
        Eigen::VectorXd next = a;
        next[k - 1] = phi;
        for (int j = 0; j < k - 1; ++j) next[j] = a[j] - phi * a[k - 2 - j];
        a = next;
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const double s_prev = (k - 1 - j == 0) ? 1.0 : s[k - 2 - j];
            acc += a[j] * s_prev;
        }
        s[k - 1] = acc;
    }
    if (ar_coefficients) *ar_coefficients = a;
    if (autocorrelations) *autocorrelations = s;
}

Eigen::VectorXd partials_from_autocorrelations(const Eigen::VectorXd& autocorrelations) {
    const int p = static_cast<int>(autocorrelations.size());
    if (p < 1) throw std::invalid_argument("partials_from_autocorrelations: empty input");
    Eigen::VectorXd phi(p);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
    phi[0] = autocorrelations[0];
    a[0] = phi[0];
    double err = 1.0 - phi[0] * phi[0];
    for (int k = 2; k <= p; ++k) {
        double acc = autocorrelations[k - 1];
        for (int j = 0; j < k - 1; ++j) acc -= a[j] * autocorrelations[k - 2 - j];
        const double next_phi = acc / err;
        Eigen::VectorXd next = a;
        next[k - 1] = next_phi;
        for (int j = 0; j < k - 1; ++j) next[j] = a[j] - next_phi * a[k - 2 - j];
        a = next;
        phi[k - 1] = next_phi;
        err *= (1.0 - next_phi * next_phi);
        if (err <= 0.0) throw std::domain_error("partials_from_autocorrelations: not positive definite");
    }
    return phi;
}

ToeplitzPcPrior::ToeplitzPcPrior(int p, double rate) : p_(p), rate_(rate) {
    if (p < 1) throw std::domain_error("ToeplitzPcPrior: p must be >= 1");
    if (!(rate > 0.0)) throw std::domain_error("ToeplitzPcPrior: rate must be positive");
}

double ToeplitzPcPrior::distance(const Eigen::VectorXd& phi) const {
    if (phi.size() != p_) throw std::invalid_argument("ToeplitzPcPrior: dimension mismatch");
    if ((phi.array().abs() >= 1.0).any())
        throw std::domain_error("ToeplitzPcPrior: partial correlations must lie in (-1,1)");
    double r = 0.0;
    for (int i = 0; i < p_; ++i) r += -std::log1p(-phi[i] * phi[i]);
    return std::sqrt(r);
}

double ToeplitzPcPrior::density(const Eigen::VectorXd& phi) const {
    if (phi.size() != p_) throw std::invalid_argument("ToeplitzPcPrior: dimension mismatch");
    if ((phi.array().abs() >= 1.0).any()) return 0.0;  // boundary carries no mass
    double r = 0.0;
    double log_jac = 0.0;
    for (int i = 0; i < p_; ++i) {
        const double one_minus = 1.0 - phi[i] * phi[i];
        r += -std::log(one_minus);
        if (phi[i] == 0.0) {
            if (p_ == 1) return 0.5 * rate_;  // base model in one dimension
            return 0.0;                       // folded sign branches pinch the density
        }
        log_jac += std::log(2.0 * std::abs(phi[i]) / one_minus);
    }
    if (r <= 0.0) return kInf;
    // simplex density in gamma_i = -log(1-phi_i^2) with h(a) = sqrt(a)
    const double d = std::sqrt(r);
    const double log_dens = std::log(rate_) - rate_ * d + simplex_log_shell(p_, r) -
                            std::log(2.0 * d) + log_jac - p_ * std::log(2.0);
    return std::exp(log_dens);
}

Eigen::VectorXd ToeplitzPcPrior::sample(Rng& rng) const {
    const double d = rng.exponential(rate_);
    Eigen::VectorXd z(p_);
    for (int i = 0; i < p_; ++i) z[i] = rng.exponential(1.0);
    const Eigen::VectorXd gamma = (d * d / z.sum()) * z;
    Eigen::VectorXd phi(p_);
    const double cap = std::nextafter(1.0, 0.0);  // draws this deep round onto the boundary
    for (int i = 0; i < p_; ++i) {
        const double mag = std::min(std::sqrt(-std::expm1(-gamma[i])), cap);
        phi[i] = rng.uniform() < 0.5 ? -mag : mag;
    }
    return phi;
}

}  // namespace pcp
