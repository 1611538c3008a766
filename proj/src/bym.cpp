#include "pcp/bym.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "pcp/interp.hpp"
#include "pcp/roots.hpp"

namespace pcp {

StructureModel scale_structure(const Eigen::MatrixXd& R, double rank_tol) {
    const int n = static_cast<int>(R.rows());
    if (R.cols() != n || n < 1) throw std::invalid_argument("scale_structure: matrix not square");
    if (!R.isApprox(R.transpose(), 1e-12))
        throw std::domain_error("scale_structure: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
    if (eig.info() != Eigen::Success) throw NumericalError("scale_structure: eigensolver failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -rank_tol * std::max(top, 1.0))
        throw std::domain_error("scale_structure: matrix indefinite");

    StructureModel model;
    model.rank_tol = rank_tol;
    model.eigenvectors = eig.eigenvectors();
    model.eigenvalues = ev.cwiseMax(0.0);
    const double cut = rank_tol * std::max(top, 1.0);
    int null_count = 0;
    model.ginv_eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) {
        if (model.eigenvalues[i] <= cut) {
            model.eigenvalues[i] = 0.0;
            model.ginv_eigenvalues[i] = 0.0;
            ++null_count;
        } else {
            model.ginv_eigenvalues[i] = 1.0 / model.eigenvalues[i];
        }
    }
    model.null_space.resize(n, null_count);
    for (int i = 0, k = 0; i < n; ++i) {
        if (model.eigenvalues[i] == 0.0) model.null_space.col(k++) = model.eigenvectors.col(i);
    }
    if (null_count == n) throw std::domain_error("scale_structure: matrix has no positive part");

    // Marginal variances of x | V^T x = 0 are the diagonal of the
    // pseudo-inverse; rescale so their geometric mean is one.
    double log_gm = 0.0;
    for (int j = 0; j < n; ++j) {
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = model.eigenvectors(j, i);
            var += u * u * model.ginv_eigenvalues[i];
        }
        if (var <= 0.0) throw std::domain_error("scale_structure: zero marginal variance");
        log_gm += std::log(var);
    }
    log_gm /= n;
    const double gm = std::exp(log_gm);
    model.matrix = gm * R;
    model.eigenvalues *= gm;
    model.ginv_eigenvalues /= gm;
    model.scaled = true;
    return model;
}

Eigen::MatrixXd read_structure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_structure_file: cannot open " + path);
    std::string tag;
    int n = 0;
    if (!(in >> tag >> n) || tag != "n" || n < 1)
        throw std::runtime_error("read_structure_file: expected header 'n <dim>'");
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    int i, j;
    double v;
    while (in >> i >> j >> v) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::runtime_error("read_structure_file: index out of range");
        R(i, j) = v;
        R(j, i) = v;
    }
    return R;
}

Eigen::MatrixXd read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_graph_file: cannot open " + path);
    std::vector<std::pair<int, int>> edges;
    int i, j, n = 0;
    while (in >> i >> j) {
        if (i < 0 || j < 0) throw std::runtime_error("read_graph_file: negative index");
        if (i == j) continue;
        edges.emplace_back(i, j);
        n = std::max(n, std::max(i, j) + 1);
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    for (auto [a, b] : edges) {
        if (R(a, b) != 0.0) continue;  // duplicate edge
        R(a, b) = R(b, a) = -1.0;
        R(a, a) += 1.0;
        R(b, b) += 1.0;
    }
    return R;
}

double bym_distance(const StructureModel& model, double phi) {
    if (!model.scaled) throw std::domain_error("bym_distance: structure must be scaled first");
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("bym_distance: phi outside [0,1]");
    const int n = model.dim();
    const double mean_ginv = model.ginv_eigenvalues.sum() / n;
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = 1.0 - phi + phi * model.ginv_eigenvalues[i];
        if (v <= 0.0) return kInf;  // singular structure at phi = 1
        log_det += std::log(v);
    }
    double d2 = n * phi * (mean_ginv - 1.0) - log_det;
    if (d2 < 0.0) {
        if (d2 < -1e-10) throw NumericalError("bym_distance: negative squared distance");
        d2 = 0.0;
    }
    return std::sqrt(d2);
}

namespace {

// Distance tabulation shared by both MixingPrior constructors.
PcPrior1d build_mixing_prior(const std::function<double(double)>& distance_fn, double base,
                             double rate) {
    if (!(base >= 0.0 && base < 1.0))
        throw std::domain_error("MixingPrior: base point must lie in [0,1)");
    constexpr int kGrid = 2001;
    std::vector<double> phi(kGrid), d(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        phi[i] = static_cast<double>(i) / (kGrid - 1);
        d[i] = distance_fn(phi[i]);
    }
    // A singular structure sends d(1) to infinity; cap the tabulation at the
    // last finite node and let the distance function report inf beyond it.
    double d_at_one = d.back();
    int last = kGrid - 1;
    while (last > 0 && !std::isfinite(d[last])) --last;
    if (last < kGrid - 1) d_at_one = kInf;

    std::vector<DistanceFunction::Branch> branches;
    if (base > 0.0) branches.push_back({0.0, base});
    if (base < 1.0) branches.push_back({base, 1.0});

    std::shared_ptr<MonotoneCubic> lower;
    if (base > 0.0) {
        std::vector<double> x, y;
        for (int i = 0; i <= static_cast<int>(base * (kGrid - 1)); ++i) {
            x.push_back(phi[i]);
            y.push_back(d[i]);
        }
        lower = std::make_shared<MonotoneCubic>(std::move(x), std::move(y));
    }
    std::shared_ptr<MonotoneCubic> upper;
    if (base < 1.0) {
        std::vector<double> x, y;
        const int first = static_cast<int>(std::ceil(base * (kGrid - 1)));
        for (int i = first; i <= last; ++i) {
            x.push_back(phi[i]);
            y.push_back(d[i]);
        }
        upper = std::make_shared<MonotoneCubic>(std::move(x), std::move(y));
    }
    const double phi_last = phi[last];
    const double d_max_global =
        std::max(lower ? (*lower)(0.0) : 0.0, std::isfinite(d_at_one) ? d.back() : kInf);

    auto eval = [lower, upper, base, phi_last, distance_fn, d_at_one](double x) -> double {
        if (x < base && lower) return (*lower)(x);
        if (upper) {
            if (x > phi_last) return distance_fn(x);  // near-singular edge, exact values
            return (*upper)(x);
        }
        return (*lower)(x);
    };
    auto deriv = [lower, upper, base, phi_last, distance_fn](double x) -> double {
        if (x < base && lower) return lower->derivative(x);
        if (upper) {
            if (x > phi_last) {
                const double h = 0.25 * (1.0 - phi_last);
                return (distance_fn(std::min(x + h, 1.0 - 1e-12)) - distance_fn(x - h)) /
                       (std::min(x + h, 1.0 - 1e-12) - (x - h));
            }
            return upper->derivative(x);
        }
        return lower->derivative(x);
    };
    return PcPrior1d(rate,
                     DistanceFunction(eval, Interval{0.0, 1.0}, std::move(branches), d_max_global,
                                      deriv));
}

}  // namespace

MixingPrior::MixingPrior(const StructureModel& model, double rate)
    : rate_(rate), base_(0.0),
      prior_(build_mixing_prior([&model](double p) { return bym_distance(model, p); }, 0.0, rate)) {}

MixingPrior::MixingPrior(std::function<double(double)> distance_fn, double base_point, double rate)
    : rate_(rate), base_(base_point),
      prior_(build_mixing_prior(distance_fn, base_point, rate)) {}

double MixingPrior::distance(double phi) const { return prior_.distance()(phi); }

double MixingPrior::d_at_one() const { return prior_.distance().branch_d_max(base_ > 0.0 ? 1 : 0); }

double MixingPrior::density(double phi) const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("MixingPrior: phi outside [0,1]");
    return prior_.density(phi);
}

double MixingPrior::cdf(double phi) const {
    TailCondition tail;
    tail.transform = [](double x) { return x; };
    tail.bound = phi;
    tail.mass = 0.5;  // unused by the probability computation
    tail.direction = TailCondition::Direction::lower;
    return prior_.tail_probability(tail);
}

double MixingPrior::sample(Rng& rng) const { return prior_.sample(rng); }

double bym_calibrate(const StructureModel& model, double u, double alpha) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("bym_calibrate: u must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("bym_calibrate: alpha must lie in (0,1)");
    const double du = bym_distance(model, u);
    const double d1 = bym_distance(model, 1.0);
    if (du <= 0.0) throw std::domain_error("bym_calibrate: structure indistinguishable from iid");
    const double floor = std::isfinite(d1) ? du / d1 : 0.0;
    if (!(alpha > floor)) {
        throw FeasibilityError("bym_calibrate: alpha must exceed d(u)/d(1)", floor, 1.0);
    }
    auto lower_mass = [&](double rate) {
        const double num = -std::expm1(-rate * du);
        const double den = std::isfinite(d1) ? -std::expm1(-rate * d1) : 1.0;
        return num / den - alpha;
    };
    const double log_rate =
        bisect([&](double t) { return lower_mass(std::exp(t)); }, std::log(1e-8), std::log(1e8),
               1e-12, 1e-13);
    return std::exp(log_rate);
}

// ---------------------------------------------------------------------------
// generalized mixing

GeneralizedMixing::GeneralizedMixing(Eigen::MatrixXd s1, Eigen::MatrixXd s2, double base_point)
    : s1_(std::move(s1)), s2_(std::move(s2)), base_(base_point) {
    const int n = static_cast<int>(s1_.rows());
    if (s2_.rows() != n || s1_.cols() != n || s2_.cols() != n)
        throw std::invalid_argument("GeneralizedMixing: dimension mismatch");
    if (!(base_ > 0.0 && base_ < 1.0))
        throw std::domain_error("GeneralizedMixing: base point must be interior");
    base_cov_ = (1.0 - base_) * s1_ + base_ * s2_;
    base_llt_.compute(base_cov_);
    if (base_llt_.info() != Eigen::Success)
        throw std::domain_error("GeneralizedMixing: base covariance singular");
    base_logdet_ = 0.0;
    for (int i = 0; i < n; ++i) base_logdet_ += 2.0 * std::log(base_llt_.matrixL()(i, i));

    // Factor the difference S2 - S1 = U diag(s) U^T, s in {-1, +1}, keeping
    // only eigenvalues that matter.
    const Eigen::MatrixXd delta = s2_ - s1_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(delta);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
        if (std::abs(eig.eigenvalues()[i]) > 1e-12 * std::max(top, 1.0)) keep.push_back(i);
    }
    delta_rank_ = static_cast<int>(keep.size());
    delta_factor_.resize(n, delta_rank_);
    delta_signs_.resize(delta_rank_);
    for (int k = 0; k < delta_rank_; ++k) {
        const double ev = eig.eigenvalues()[keep[k]];
        delta_factor_.col(k) = eig.eigenvectors().col(keep[k]) * std::sqrt(std::abs(ev));
        delta_signs_[k] = ev >= 0.0 ? 1.0 : -1.0;
    }
    lemma_core_ = delta_factor_.transpose() * base_llt_.solve(delta_factor_);
}

double GeneralizedMixing::dense_logdet(double phi) const {
    const Eigen::MatrixXd cov = (1.0 - phi) * s1_ + phi * s2_;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("GeneralizedMixing: covariance singular");
    double logdet = 0.0;
    for (int i = 0; i < cov.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return logdet;
}

double GeneralizedMixing::lemma_logdet(double phi) const {
    // det(Sigma0 + t U diag(s) U^T) = det(I + t diag(s) U^T Sigma0^{-1} U) det(Sigma0)
    const double t = phi - base_;
    Eigen::MatrixXd core = Eigen::MatrixXd::Identity(delta_rank_, delta_rank_) +
                           t * (delta_signs_.asDiagonal() * lemma_core_);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(core);
    const double det = lu.determinant();
    if (det <= 0.0) throw std::domain_error("GeneralizedMixing: covariance singular");
    return std::log(det) + base_logdet_;
}

double GeneralizedMixing::distance(double phi) const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("GeneralizedMixing: phi outside [0,1]");
    const int n = static_cast<int>(s1_.rows());
    const Eigen::MatrixXd cov = (1.0 - phi) * s1_ + phi * s2_;
    const double trace = base_llt_.solve(cov).trace();
    const bool low_rank = delta_rank_ * 2 < n;
    const double logdet = low_rank ? lemma_logdet(phi) : dense_logdet(phi);
    double two_kld = trace - n - (logdet - base_logdet_);
    if (two_kld < 0.0) {
        if (two_kld < -1e-10) throw NumericalError("GeneralizedMixing: negative squared distance");
        two_kld = 0.0;
    }
    return std::sqrt(two_kld);
}

// ---------------------------------------------------------------------------
// variance weights

Eigen::VectorXd WeightsPcPrior::weights_from_logratio(const Eigen::VectorXd& logratio) {
    const int n = static_cast<int>(logratio.size()) + 1;
    Eigen::VectorXd w(n);
    double denom = 1.0;
    for (int i = 0; i < n - 1; ++i) denom += std::exp(logratio[i]);
    for (int i = 0; i < n - 1; ++i) w[i] = std::exp(logratio[i]) / denom;
    w[n - 1] = 1.0 / denom;
    return w;
}

Eigen::VectorXd WeightsPcPrior::logratio_from_weights(const Eigen::VectorXd& weights) {
    const int n = static_cast<int>(weights.size());
    if (n < 2) throw std::invalid_argument("logratio_from_weights: need at least two weights");
    if ((weights.array() <= 0.0).any())
        throw std::domain_error("logratio_from_weights: weights must be positive");
    Eigen::VectorXd wt(n - 1);
    for (int i = 0; i < n - 1; ++i) wt[i] = std::log(weights[i] / weights[n - 1]);
    return wt;
}

Eigen::MatrixXd WeightsPcPrior::mixture_cov(const Eigen::VectorXd& logratio) const {
    const Eigen::VectorXd w = weights_from_logratio(logratio);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(covs_[0].rows(), covs_[0].cols());
    for (int i = 0; i < n_; ++i) cov += w[i] * covs_[i];
    return cov;
}

double WeightsPcPrior::kld(const Eigen::VectorXd& logratio) const {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(base_cov_.rows());
    return kld_gaussian(zero, base_cov_, zero, mixture_cov(logratio));
}

Eigen::VectorXd WeightsPcPrior::kld_gradient_at_base() const {
    const int m = n_ - 1;
    Eigen::VectorXd g(m);
    const double step = 1e-4;
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[i] = step;
        g[i] = (kld(e) - kld(-e)) / (2.0 * step);
    }
    return g;
}

WeightsPcPrior::WeightsPcPrior(std::vector<Eigen::MatrixXd> component_covariances, double rate)
    : covs_(std::move(component_covariances)),
      n_(static_cast<int>(covs_.size())),
      prior_(1.0, 1) /* replaced below */ {
    if (n_ < 2) throw std::domain_error("WeightsPcPrior: need at least two components");
    const int rows = static_cast<int>(covs_[0].rows());
    for (const auto& c : covs_) {
        if (c.rows() != rows || c.cols() != rows)
            throw std::invalid_argument("WeightsPcPrior: covariance dimensions differ");
    }
    base_cov_ = Eigen::MatrixXd::Zero(rows, rows);
    for (const auto& c : covs_) base_cov_ += c / static_cast<double>(n_);
    if (Eigen::LLT<Eigen::MatrixXd>(base_cov_).info() != Eigen::Success)
        throw std::domain_error("WeightsPcPrior: equal-weight mixture not positive definite");

    // Hessian of the divergence at the base by central differences.
    const int m = n_ - 1;
    const double step = 1e-4;
    Eigen::MatrixXd H(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            Eigen::VectorXd pp = Eigen::VectorXd::Zero(m), pm = pp, mp = pp, mm = pp;
            pp[i] += step; pp[j] += step;
            pm[i] += step; pm[j] -= step;
            mp[i] -= step; mp[j] += step;
            mm[i] -= step; mm[j] -= step;
            H(i, j) = H(j, i) = (kld(pp) - kld(pm) - kld(mp) + kld(mm)) / (4.0 * step * step);
        }
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const double trace = H.trace();
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(trace > 0.0) || !(eig.eigenvalues().maxCoeff() > 0.0) ||
        eig.eigenvalues().minCoeff() < -1e-6 * top) {
        throw std::domain_error("WeightsPcPrior: components indistinguishable (degenerate Hessian)");
    }
    const double floor = 1e-10 * trace / m;
    Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(floor);
    hessian_ = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    prior_ = SpherePcPrior(rate, m, RadialMap::sqrt_two_a(), hessian_);
}

double WeightsPcPrior::density_logratio(const Eigen::VectorXd& logratio) const {
    return prior_.density(logratio);
}

Eigen::VectorXd WeightsPcPrior::sample_logratio(Rng& rng) const { return prior_.sample(rng); }

Eigen::VectorXd WeightsPcPrior::sample_weights(Rng& rng) const {
    return weights_from_logratio(sample_logratio(rng));
}

}  // namespace pcp
