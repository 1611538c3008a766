#include "pcp/distance.hpp"

#include <algorithm>
#include <cmath>

#include "pcp/roots.hpp"

namespace pcp {

namespace {

constexpr double kRateLo = 1e-8;
constexpr double kRateHi = 1e8;

// 1 - exp(-rate d), stable for small arguments; equals 1 at d = inf.
double exp_mass_below(double rate, double d) {
    if (std::isinf(d)) return 1.0;
    return -std::expm1(-rate * d);
}

}  // namespace

DistanceFunction::DistanceFunction(Map evaluate, Interval support, double d_max, Map derivative)
    : DistanceFunction(std::move(evaluate), support, std::vector<Branch>{{support.lo, support.hi}},
                       d_max, std::move(derivative)) {}

DistanceFunction::DistanceFunction(Map evaluate, Interval support, std::vector<Branch> branches,
                                   double d_max, Map derivative)
    : evaluate_(std::move(evaluate)),
      derivative_(std::move(derivative)),
      support_(support),
      branches_(std::move(branches)),
      d_max_(d_max) {
    if (branches_.empty()) throw std::invalid_argument("DistanceFunction: no branches");
}

double DistanceFunction::operator()(double xi) const {
    if (!(support_.contains(xi))) throw std::domain_error("DistanceFunction: xi outside support");
    return evaluate_(xi);
}

double DistanceFunction::derivative_abs(double xi) const {
    if (!(support_.contains(xi))) throw std::domain_error("DistanceFunction: xi outside support");
    if (derivative_) return std::abs(derivative_(xi));
    const double h = std::max(1e-6 * std::abs(xi), 1e-8);
    if (xi - h >= support_.lo && xi + h <= support_.hi) {
        return std::abs((evaluate_(xi + h) - evaluate_(xi - h)) / (2.0 * h));
    }
    // one-sided second-order stencil near a support boundary
    if (xi + 2.0 * h <= support_.hi) {
        return std::abs((-3.0 * evaluate_(xi) + 4.0 * evaluate_(xi + h) - evaluate_(xi + 2.0 * h)) /
                        (2.0 * h));
    }
    return std::abs((3.0 * evaluate_(xi) - 4.0 * evaluate_(xi - h) + evaluate_(xi - 2.0 * h)) /
                    (2.0 * h));
}

double DistanceFunction::branch_d_max(std::size_t b) const {
    const Branch& br = branches_.at(b);
    // d is monotone on the branch, so the sup sits at an endpoint; a singular
    // endpoint (log of zero and the like) means the sup is infinite.
    auto at = [&](double x) {
        const double v = evaluate_(x);
        return std::isnan(v) ? kInf : v;
    };
    return std::max(at(br.lo), at(br.hi));
}

namespace {

// Monotone surrogate map from t in (0,1) onto a branch; infinite endpoints
// become rational blowups so bisection can reach them.
double branch_point(const DistanceFunction::Branch& br, double t) {
    if (std::isinf(br.lo) && std::isinf(br.hi)) return std::tan(M_PI * (t - 0.5));
    if (std::isinf(br.hi)) return br.lo + t / (1.0 - t);
    if (std::isinf(br.lo)) return br.hi - (1.0 - t) / t;
    return br.lo + (br.hi - br.lo) * t;
}

}  // namespace

void DistanceFunction::verify_branch_monotone(std::size_t b) const {
    const Branch& br = branches_.at(b);
    double prev = kInf;
    int direction = 0;  // -1 decreasing, +1 increasing
    for (int k = 1; k <= 9; ++k) {
        const double v = evaluate_(branch_point(br, k / 10.0));
        if (!std::isfinite(v) || !std::isfinite(prev)) {
            prev = v;
            continue;
        }
        const int step = v > prev + 1e-12 ? 1 : (v < prev - 1e-12 ? -1 : 0);
        if (step != 0 && direction != 0 && step != direction) {
            throw NumericalError("DistanceFunction: distance not monotone on branch");
        }
        if (step != 0) direction = step;
        prev = v;
    }
}

double DistanceFunction::invert_on_branch(std::size_t b, double target) const {
    const Branch& br = branches_.at(b);
    auto x_of = [&](double t) { return branch_point(br, t); };
    auto f_of = [&](double t) {
        const double v = evaluate_(x_of(t));
        return std::isnan(v) ? kInf : v;
    };
    // Trim inward from any edge where the distance is not finite.
    double t_lo = 1e-14, t_hi = 1.0 - 1e-14;
    while (!std::isfinite(f_of(t_lo)) && t_lo < 0.4) t_lo *= 32.0;
    while (!std::isfinite(f_of(t_hi)) && t_hi > 0.6) t_hi = 1.0 - 32.0 * (1.0 - t_hi);
    double f_lo = f_of(t_lo);
    double f_hi = f_of(t_hi);
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
        throw NumericalError("invert_on_branch: distance not finitely representable on branch");
    }
    if ((f_lo - target) * (f_hi - target) > 0.0) {
        // Beyond the representable range: saturate at the nearer end.
        if (target >= std::max(f_lo, f_hi)) return x_of(f_lo > f_hi ? t_lo : t_hi);
        return x_of(f_lo < f_hi ? t_lo : t_hi);
    }
    double fa = f_lo - target;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (t_lo + t_hi);
        const double fm = f_of(mid) - target;
        if (fm == 0.0 || (t_hi - t_lo) <= 1e-16) break;
        if (std::signbit(fm) == std::signbit(fa)) {
            t_lo = mid;
            fa = fm;
        } else {
            t_hi = mid;
        }
    }
    return x_of(0.5 * (t_lo + t_hi));
}

std::size_t DistanceFunction::branch_of(double xi) const {
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        if (xi >= branches_[b].lo && xi <= branches_[b].hi) return b;
    }
    throw std::domain_error("DistanceFunction: xi outside every branch");
}

PcPrior1d::PcPrior1d(double rate, DistanceFunction distance)
    : rate_(rate), distance_(std::move(distance)) {
    if (!(rate > 0.0)) throw std::domain_error("PcPrior1d: rate must be positive");
    const double dm = distance_.d_max();
    if (!(dm > 0.0)) throw std::domain_error("PcPrior1d: distance is identically zero");
    truncated_ = std::isfinite(dm);
    normalizer_ = truncated_ ? 1.0 / exp_mass_below(rate_, dm) : 1.0;
}

int PcPrior1d::alive(double d) const {
    int n = 0;
    for (std::size_t b = 0; b < distance_.branches().size(); ++b) {
        if (d <= distance_.branch_d_max(b)) ++n;
    }
    return std::max(n, 1);
}

double PcPrior1d::density(double xi) const {
    const double d = distance_(xi);
    if (!std::isfinite(d)) return 0.0;  // measure-zero boundary degeneracy
    const double jac = distance_.derivative_abs(xi);
    if (!std::isfinite(jac)) {
        // an overflowed Jacobian is either beaten by the vanished
        // exponential or a genuine integrable spike
        return rate_ * d > 700.0 ? 0.0 : kInf;
    }
    const double w = 1.0 / static_cast<double>(alive(d));
    return rate_ * std::exp(-rate_ * d) * jac * w * normalizer_;
}

double PcPrior1d::level_mass(double d_lo, double d_hi) const {
    if (!(d_hi > d_lo)) return 0.0;
    // 1/alive is piecewise constant between branch d_max breakpoints.
    std::vector<double> cuts{d_lo};
    for (std::size_t b = 0; b < distance_.branches().size(); ++b) {
        const double m = distance_.branch_d_max(b);
        if (m > d_lo && m < d_hi) cuts.push_back(m);
    }
    cuts.push_back(d_hi);
    std::sort(cuts.begin(), cuts.end());
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = std::isinf(cuts[i + 1]) ? cuts[i + 1] : 0.5 * (cuts[i] + cuts[i + 1]);
        const double w = 1.0 / static_cast<double>(alive(mid));
        mass += w * (exp_mass_below(rate_, cuts[i + 1]) - exp_mass_below(rate_, cuts[i]));
    }
    return mass * normalizer_;
}

double PcPrior1d::tail_probability(const TailCondition& tail) const {
    const bool upper = tail.direction == TailCondition::Direction::upper;
    double prob = 0.0;
    for (std::size_t b = 0; b < distance_.branches().size(); ++b) {
        const auto& br = distance_.branches()[b];
        const double width = (std::isfinite(br.lo) && std::isfinite(br.hi)) ? br.hi - br.lo : 1.0;
        const double eps = 1e-12 * std::max(1.0, std::abs(width));
        const double a = std::isinf(br.lo) ? -1e12 : br.lo + eps;
        const double c = std::isinf(br.hi) ? 1e12 : br.hi - eps;
        const double qa = tail.transform(a) - tail.bound;
        const double qc = tail.transform(c) - tail.bound;

        // Event region on this branch, assuming Q monotone per branch.
        double x_lo = a, x_hi = c;
        bool touches_lo = true, touches_hi = true;
        if (std::signbit(qa) == std::signbit(qc) && qa != 0.0 && qc != 0.0) {
            const bool inside = (qa > 0.0) == upper;
            if (!inside) continue;
        } else {
            const double cross =
                bisect([&](double x) { return tail.transform(x) - tail.bound; }, a, c, 0.0, 1e-14);
            if ((qc > 0.0) == upper) {
                x_lo = cross;
                touches_lo = false;
            } else {
                x_hi = cross;
                touches_hi = false;
            }
        }
        // Map to the distance scale; at true branch edges use the exact edge
        // value so singular tails keep their full exponential mass.
        const double d_lo_side = touches_lo ? edge_distance(br.lo) : distance_(x_lo);
        const double d_hi_side = touches_hi ? edge_distance(br.hi) : distance_(x_hi);
        prob += level_mass(std::min(d_lo_side, d_hi_side), std::max(d_lo_side, d_hi_side));
    }
    return prob;
}

double PcPrior1d::edge_distance(double x) const {
    double v;
    if (std::isinf(x)) {
        // limit toward an infinite support edge
        v = distance_(std::copysign(1e300, x));
    } else {
        v = distance_(x);
    }
    return std::isnan(v) ? kInf : v;
}

double PcPrior1d::sample(Rng& rng) const {
    const double u = rng.uniform();
    const double cap = truncated_ ? exp_mass_below(rate_, distance_.d_max()) : 1.0;
    const double d = -std::log1p(-u * cap) / rate_;
    std::vector<std::size_t> candidates;
    for (std::size_t b = 0; b < distance_.branches().size(); ++b) {
        if (d <= distance_.branch_d_max(b)) candidates.push_back(b);
    }
    if (candidates.empty()) candidates.push_back(0);
    const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size()));
    return distance_.invert_on_branch(candidates[std::min(k, candidates.size() - 1)], d);
}

double kld_gaussian(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                    const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1) {
    const Eigen::Index p = mean0.size();
    if (mean1.size() != p || cov0.rows() != p || cov0.cols() != p || cov1.rows() != p ||
        cov1.cols() != p) {
        throw std::invalid_argument("kld_gaussian: dimension mismatch");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt0(cov0);
    if (llt0.info() != Eigen::Success)
        throw std::domain_error("kld_gaussian: base covariance not SPD");
    const Eigen::LLT<Eigen::MatrixXd> llt1(cov1);
    if (llt1.info() != Eigen::Success)
        throw std::domain_error("kld_gaussian: flexible covariance not SPD");

    const double trace = llt0.solve(cov1).trace();
    const Eigen::VectorXd dm = mean0 - mean1;
    const double maha = dm.dot(llt0.solve(dm));
    double logdet0 = 0.0, logdet1 = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        logdet0 += 2.0 * std::log(llt0.matrixL()(i, i));
        logdet1 += 2.0 * std::log(llt1.matrixL()(i, i));
    }
    return 0.5 * (trace + maha - static_cast<double>(p) - (logdet1 - logdet0));
}

double distance_from_kld(double kld) {
    if (kld < 0.0) throw std::domain_error("distance_from_kld: negative divergence");
    return std::sqrt(2.0 * kld);
}

double pc_density(const PcPrior1d& prior, double xi) { return prior.density(xi); }

std::vector<std::pair<double, double>> prior_on_distance_scale(
    const std::function<double(double)>& density_xi, const DistanceFunction& distance,
    const std::vector<double>& d_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(d_grid.size());
    for (std::size_t b = 0; b < distance.branches().size(); ++b) {
        distance.verify_branch_monotone(b);
    }
    for (double d : d_grid) {
        double val = 0.0;
        for (std::size_t b = 0; b < distance.branches().size(); ++b) {
            if (d > distance.branch_d_max(b)) continue;
            const double xi = distance.invert_on_branch(b, d);
            const double jac = distance.derivative_abs(xi);
            if (jac <= 0.0) throw NumericalError("prior_on_distance_scale: vanishing Jacobian");
            val += density_xi(xi) / jac;
        }
        out.emplace_back(d, val);
    }
    return out;
}

double calibrate_rate(const DistanceFunction& distance, const TailCondition& tail) {
    if (!(tail.mass > 0.0 && tail.mass < 1.0))
        throw std::domain_error("calibrate_rate: alpha must lie in (0,1)");
    auto prob_at = [&](double rate) { return PcPrior1d(rate, distance).tail_probability(tail); };
    const double p_lo = prob_at(kRateLo);
    const double p_hi = prob_at(kRateHi);
    const double a = std::min(p_lo, p_hi);
    const double b = std::max(p_lo, p_hi);
    if (tail.mass < a - 1e-10 || tail.mass > b + 1e-10) {
        throw FeasibilityError("calibrate_rate: tail statement unattainable", a, b);
    }
    const double log_rate =
        bisect([&](double t) { return prob_at(std::exp(t)) - tail.mass; }, std::log(kRateLo),
               std::log(kRateHi), 1e-10, 1e-13);
    return std::exp(log_rate);
}

}  // namespace pcp
