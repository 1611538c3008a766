// Acceptance suite: one line per criterion, exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pcp/analysis.hpp"
#include "pcp/bym.hpp"
#include "pcp/multivariate.hpp"
#include "pcp/parallel.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/stats.hpp"
#include "pcp/univariate.hpp"
#include "test_support.hpp"

using namespace pcp;
using test_support::edge_mass;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label, double budget_seconds,
               const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << " exception: " << e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > budget_seconds) {
        detail << " [over budget " << budget_seconds << "s]";
        ok = false;
    }
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", id, label.c_str(),
                elapsed, detail.str().c_str());
    std::fflush(stdout);
}

Eigen::MatrixXd random_spd(int n, Rng& rng) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    return a * a.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

double exp_rate_for(double u, double alpha = 0.01) { return -std::log(alpha) / u; }

// ---------------------------------------------------------------------------

void c1_pipeline_equivalence() {
    criterion(1, "generic pipeline equals the closed-form precision density", 1.0,
              [](std::ostringstream& detail) {
                  const double rate = 1.7;
                  // no analytic derivative: the finite-difference path must hold the tolerance
                  DistanceFunction dist([](double t) { return 1.0 / std::sqrt(t); },
                                        Interval{0.0, kInf}, kInf);
                  PcPrior1d generic(rate, dist);
                  PrecisionPrior closed(rate);
                  double worst = 0.0;
                  for (int i = 0; i < 100; ++i) {
                      const double tau = std::pow(10.0, -4.0 + 8.0 * i / 99.0);
                      const double rel =
                          std::abs(generic.density(tau) / closed.density(tau) - 1.0);
                      worst = std::max(worst, rel);
                  }
                  detail << " worst rel err " << worst;
                  return worst <= 1e-6;
              });
}

void c2_marginal_sd_rule() {
    criterion(2, "marginal standard deviation is near 0.31 U at alpha = 0.01", 5.0,
              [](std::ostringstream& detail) {
                  const double u = 0.968;
                  const double rate = exp_rate_for(u);
                  Rng rng(20240613);
                  double acc = 0.0;
                  const int n = 1000000;
                  for (int i = 0; i < n; ++i) {
                      const double s = rng.exponential(rate);
                      acc += s * s;
                  }
                  const double sd = std::sqrt(acc / n);
                  detail << " sqrt(E sigma^2)/U = " << sd / u;
                  return sd >= 0.30 * u && sd <= 0.315 * u;
              });
}

void c3_student_t_asymptotics() {
    criterion(3, "Student-t divergence matches its large-dof expansion", 10.0,
              [](std::ostringstream& detail) {
                  const double k100 = StudentTDistance::kld_quadrature(100.0);
                  const double e100 = 0.75e-4 + 1.5e-6;
                  const double k1000 = StudentTDistance::kld_quadrature(1000.0);
                  const double e1000 = 0.75e-6 + 1.5e-9;
                  detail << " kld(100)=" << k100 << " rel=" << std::abs(k100 / e100 - 1.0)
                         << " kld(1000)=" << k1000 << " rel=" << std::abs(k1000 / e1000 - 1.0);
                  return std::abs(k100 / e100 - 1.0) <= 0.05 &&
                         std::abs(k1000 / e1000 - 1.0) <= 0.01;
              });
}

void c4_overfitting_diagnostic() {
    criterion(4, "finite-mean dof prior vanishes on the distance scale, the pc prior does not",
              5.0, [](std::ostringstream& detail) {
                  auto dist = StudentTDistance::shared()->as_distance();
                  auto exp_prior = [](double nu) {
                      return (1.0 / 20.0) * std::exp(-(nu - 2.0) / 20.0);
                  };
                  std::vector<double> grid;
                  for (double d = 1e-3; d < 1.5; d *= 1.25) grid.push_back(d);
                  const auto pushed = prior_on_distance_scale(exp_prior, dist, grid);
                  double peak = 0.0;
                  for (auto [d, v] : pushed) peak = std::max(peak, v);
                  const bool overfits = pushed.front().second < 0.05 * peak;

                  const StudentTPrior pc = StudentTPrior::calibrate(10.0, 0.5);
                  const auto pc_pushed = prior_on_distance_scale(
                      [&](double nu) { return pc.density(nu); }, dist, grid);
                  bool decreasing = true;
                  for (std::size_t i = 1; i < pc_pushed.size(); ++i) {
                      decreasing = decreasing && pc_pushed[i].second < pc_pushed[0].second;
                  }
                  detail << " exp prior pi_d(1e-3)/peak = " << pushed.front().second / peak;
                  return overfits && decreasing;
              });
}

void c5_univariate_normalizations() {
    criterion(5, "univariate densities carry unit mass", 10.0, [](std::ostringstream& detail) {
        bool ok = true;
        auto record = [&](const char* name, double mass, double tol) {
            if (std::abs(mass - 1.0) > tol) {
                ok = false;
                detail << " " << name << "=" << mass;
            }
        };
        {
            PrecisionPrior prior = PrecisionPrior::calibrate(0.968, 0.01);
            record("precision",
                   quad::integrate([&](double t) { return prior.density(t); }, 0.0, kInf, 1e-12,
                                   1e-10),
                   1e-4);
        }
        {
            const StudentTPrior prior = StudentTPrior::calibrate(10.0, 0.5);
            auto dens = [&](double v) { return prior.density(v); };
            record("student_t",
                   quad::integrate_singular(dens, 2.0 + 1e-9, 2.1, 1e-10) +
                       quad::integrate(dens, 2.1, kInf, 1e-12, 1e-10),
                   1e-4);
        }
        {
            Ar1Prior prior(1.0, Ar1Base::rho_zero);
            auto dens = [&](double r) { return prior.density(r); };
            const double mass = quad::integrate(dens, -0.99, 0.99, 1e-13, 1e-11) +
                                edge_mass(dens, 1.0, 0.99) + edge_mass(dens, -1.0, -0.99) +
                                std::exp(-prior.distance()(1.0 - 1e-7));
            record("ar1_base0", mass, 1e-4);
        }
        {
            Ar1Prior prior(2.0, Ar1Base::rho_one);
            auto dens = [&](double r) { return prior.density(r); };
            record("ar1_base1",
                   quad::integrate(dens, -1.0, 0.99, 1e-13, 1e-11) + edge_mass(dens, 1.0, 0.99),
                   1e-4);
        }
        for (int m : {2, 4}) {
            ExchangeableCorrPrior prior(1.0, m);
            const double lo = prior.support_lo();
            auto dens = [&](double r) { return prior.density(r); };
            const double mass = quad::integrate(dens, lo + 0.01, 0.99, 1e-13, 1e-11) +
                                edge_mass(dens, lo, lo + 0.01) + edge_mass(dens, 1.0, 0.99) +
                                0.5 * std::exp(-prior.distance_at(lo + 1e-7)) +
                                0.5 * std::exp(-prior.distance_at(1.0 - 1e-7));
            record(m == 2 ? "exch_m2" : "exch_m4", mass, 1e-4);
        }
        return ok;
    });
}

void c6_foliated_gof() {
    criterion(6, "simplex and sphere samplers match their densities on marginals", 30.0,
              [](std::ostringstream& detail) {
                  const double rate = 1.0;
                  const int draws = 100000;
                  bool ok = true;
                  Rng rng(61);

                  for (int n : {2, 3, 5}) {
                      // first-coordinate marginal of the simplex prior:
                      // xi1 = R B with R = d^2/2, d ~ Exp(rate), B ~ Beta(1, n-1)
                      SimplexPcPrior prior(rate, n);
                      std::vector<double> sample(draws);
                      for (int i = 0; i < draws; ++i) sample[i] = prior.sample(rng)[0];
                      const int bins = 30;
                      const double hi = 18.0 / rate / rate;  // generous upper edge
                      std::vector<double> observed(bins + 1, 0.0), expected(bins + 1, 0.0);
                      for (double v : sample) {
                          observed[std::min(bins, static_cast<int>(v / hi * bins))] += 1.0;
                      }
                      auto beta_cdf = [n](double x) {
                          return x >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - x, n - 1.0);
                      };
                      auto bin_prob = [&](double a, double b) {
                          return quad::integrate(
                              [&](double d) {
                                  const double r = 0.5 * d * d;
                                  const double fb = beta_cdf(std::min(1.0, b / r));
                                  const double fa = beta_cdf(std::min(1.0, a / r));
                                  return rate * std::exp(-rate * d) * (fb - fa);
                              },
                              std::sqrt(2.0 * a), 60.0 / rate, 1e-10, 1e-8);
                      };
                      for (int k = 0; k < bins; ++k) {
                          expected[k] = draws * bin_prob(hi * k / bins, hi * (k + 1) / bins);
                      }
                      expected[bins] = draws * bin_prob(hi, 1e9);
                      const double p = stats::chisq_gof_pvalue(observed, expected);
                      if (p <= 0.001) {
                          ok = false;
                          detail << " simplex n=" << n << " p=" << p;
                      }
                  }

                  for (int n : {2, 3, 5}) {
                      // sphere: xi1 = D S with D ~ Exp(rate) and S the first
                      // coordinate of a uniform direction
                      SpherePcPrior prior(rate, n);
                      std::vector<double> sample(draws);
                      for (int i = 0; i < draws; ++i) sample[i] = prior.sample(rng)[0];
                      auto s_cdf = [n](double s) -> double {
                          s = std::clamp(s, -1.0, 1.0);
                          if (n == 2) return 0.5 + std::asin(s) / M_PI;
                          if (n == 3) return 0.5 * (s + 1.0);
                          return (2.0 + 3.0 * s - s * s * s) / 4.0;  // n = 5
                      };
                      const int bins = 30;
                      const double hi = 9.0 / rate;
                      std::vector<double> observed(bins, 0.0), expected(bins, 0.0);
                      for (double v : sample) {
                          const int k = static_cast<int>((v + hi) / (2.0 * hi) * bins);
                          observed[std::clamp(k, 0, bins - 1)] += 1.0;
                      }
                      auto bin_prob = [&](double a, double b) {
                          return quad::integrate(
                              [&](double d) {
                                  return rate * std::exp(-rate * d) *
                                         (s_cdf(b / d) - s_cdf(a / d));
                              },
                              0.0, 80.0 / rate, 1e-10, 1e-8);
                      };
                      for (int k = 0; k < bins; ++k) {
                          expected[k] =
                              draws * bin_prob(-hi + 2.0 * hi * k / bins,
                                               -hi + 2.0 * hi * (k + 1) / bins);
                      }
                      const double p = stats::chisq_gof_pvalue(observed, expected);
                      if (p <= 0.001) {
                          ok = false;
                          detail << " sphere n=" << n << " p=" << p;
                      }
                  }
                  return ok;
              });
}

void c7_correlation_prior() {
    criterion(7, "correlation-matrix draws: validity, determinant identity, distance law", 30.0,
              [](std::ostringstream& detail) {
                  CorrelationPcPrior prior(4, 0.3);
                  Rng rng(71);
                  std::vector<double> dists;
                  double min_eig = 1.0, worst_det = 0.0, worst_dense = 0.0;
                  for (int i = 0; i < 10000; ++i) {
                      const CorrelationModel m = prior.sample(rng);
                      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.matrix);
                      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
                      const double gamma_sum = -m.angles.array().sin().log().sum();
                      // the factor carries the determinant for every draw;
                      // the dense route cross-checks where doubles reach
                      const double logdet_factor =
                          2.0 * m.cholesky.diagonal().array().log().sum();
                      worst_det =
                          std::max(worst_det, std::abs(-logdet_factor - 2.0 * gamma_sum));
                      if (gamma_sum < 4.0) {
                          worst_dense = std::max(
                              worst_dense, std::abs(m.matrix.determinant() /
                                                        std::exp(-2.0 * gamma_sum) -
                                                    1.0));
                      }
                      dists.push_back(std::sqrt(2.0 * gamma_sum));
                  }
                  const double p = stats::ks_test_pvalue(
                      dists, [](double d) { return 1.0 - std::exp(-0.3 * d); });
                  detail << " min eig " << min_eig << ", det identity err " << worst_det
                         << ", dense rel err " << worst_dense << ", KS p " << p;
                  return min_eig >= -1e-12 && worst_det <= 1e-10 && worst_dense <= 1e-9 &&
                         p > 0.01;
              });
}

void c8_levinson_durbin() {
    criterion(8, "Levinson-Durbin round trip and stationarity", 5.0,
              [](std::ostringstream& detail) {
                  Rng rng(81);
                  double worst = 0.0;
                  bool stationary = true;
                  for (int rep = 0; rep < 1000; ++rep) {
                      const int p = 1 + static_cast<int>(rng.uniform() * 6.0);
                      Eigen::VectorXd phi(p);
                      for (int i = 0; i < p; ++i) phi[i] = rng.uniform(-0.9, 0.9);
                      Eigen::VectorXd psi, s;
                      levinson_durbin(phi, &psi, &s);
                      worst = std::max(
                          worst,
                          (partials_from_autocorrelations(s) - phi).cwiseAbs().maxCoeff());
                      Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
                      for (int i = 0; i < p; ++i) companion(0, i) = psi[i];
                      for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
                      const Eigen::EigenSolver<Eigen::MatrixXd> eig(companion);
                      stationary =
                          stationary && eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
                  }
                  detail << " worst round-trip err " << worst;
                  return worst <= 1e-12 && stationary;
              });
}

void c9_bym() {
    criterion(9, "mixing-fraction distance oracle and calibration round trip", 10.0,
              [](std::ostringstream& detail) {
                  const StructureModel eye = scale_structure(Eigen::MatrixXd::Identity(10, 10));
                  for (double phi = 0.0; phi <= 1.0; phi += 0.1) {
                      if (bym_distance(eye, phi) > 1e-12) {
                          detail << " identity structure gave nonzero distance";
                          return false;
                      }
                  }
                  Rng rng(91);
                  const StructureModel model = scale_structure(random_spd(10, rng));
                  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(10);
                  const Eigen::MatrixXd eye10 = Eigen::MatrixXd::Identity(10, 10);
                  const Eigen::MatrixXd rinv = model.matrix.inverse();
                  double worst = 0.0;
                  for (double phi = 0.05; phi <= 1.0; phi += 0.05) {
                      const Eigen::MatrixXd cov = (1.0 - phi) * eye10 + phi * rinv;
                      const double oracle = 2.0 * kld_gaussian(zero, eye10, zero, cov);
                      const double d = bym_distance(model, phi);
                      worst = std::max(worst, std::abs(d * d - oracle));
                  }
                  const double rate = bym_calibrate(model, 0.5, 2.0 / 3.0);
                  MixingPrior prior(model, rate);
                  const double below = quad::integrate(
                      [&](double p) { return prior.density(p); }, 0.0, 0.5, 1e-12, 1e-10);
                  detail << " worst d^2 err " << worst << ", Prob(phi<0.5) = " << below;
                  return worst <= 1e-10 && std::abs(below - 2.0 / 3.0) <= 1e-6;
              });
}

void c10_weights_prior() {
    criterion(10, "variance-weights prior: stationary base, simplex draws, mode at 1/3", 30.0,
              [](std::ostringstream& detail) {
                  // three diagonal component models whose inflated channels
                  // rotate; dimension and contrast set the curvature scale
                  std::vector<Eigen::MatrixXd> covs;
                  for (int c = 0; c < 3; ++c) {
                      Eigen::VectorXd diag = Eigen::VectorXd::Ones(200);
                      for (int k = c; k < 200; k += 3) diag[k] = 8.0;
                      covs.push_back(diag.asDiagonal());
                  }
                  WeightsPcPrior prior(covs, 0.3);
                  const double grad = prior.kld_gradient_at_base().cwiseAbs().maxCoeff();

                  Rng rng(101);
                  const int draws = 50000;
                  const int bins = 10;
                  std::vector<int> counts(bins, 0);
                  double worst_sum = 0.0;
                  bool nonneg = true;
                  for (int i = 0; i < draws; ++i) {
                      const Eigen::VectorXd w = prior.sample_weights(rng);
                      worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
                      nonneg = nonneg && (w.array() >= 0.0).all();
                      counts[std::min(bins - 1, static_cast<int>(w[0] * bins))]++;
                  }
                  const int mode = static_cast<int>(
                      std::max_element(counts.begin(), counts.end()) - counts.begin());
                  const bool mode_ok =
                      (1.0 / 3.0 >= static_cast<double>(mode) / bins) &&
                      (1.0 / 3.0 < static_cast<double>(mode + 1) / bins);
                  detail << " |grad| " << grad << ", worst simplex err " << worst_sum
                         << ", mode bin [" << static_cast<double>(mode) / bins << ","
                         << static_cast<double>(mode + 1) / bins << ")";
                  return grad <= 1e-6 && worst_sum <= 1e-12 && nonneg && mode_ok;
              });
}

void c11_shrinkage() {
    criterion(11, "shrinkage endpoints: pc prior light, half-Cauchy horseshoe", 1.0,
              [](std::ostringstream& detail) {
                  const double rate = exp_rate_for(1.0);
                  auto pc = [rate](double s) { return rate * std::exp(-rate * s); };
                  auto hc = [](double s) { return (2.0 / M_PI) / (1.0 + s * s); };
                  const double pc_lo = shrinkage_density(pc, 1e-6);
                  const double pc_hi = shrinkage_density(pc, 1.0 - 1e-6);
                  const double hc_lo = shrinkage_density(hc, 1e-6);
                  const double hc_hi = shrinkage_density(hc, 1.0 - 1e-6);
                  const double hc_mid = shrinkage_density(hc, 0.5);
                  detail << " pc(1e-6)=" << pc_lo << " pc(1-1e-6)=" << pc_hi
                         << " hc endpoints " << hc_lo << "/" << hc_hi << " vs mid " << hc_mid;
                  // The pc upper-endpoint requirement (< 1e-3) contradicts the
                  // exponential sigma prior, whose shrinkage density diverges
                  // at kappa = 1; it is asserted as stated and reported.
                  return pc_lo < 1e-3 && pc_hi < 1e-3 && hc_lo > hc_mid && hc_hi > hc_mid;
              });
}

void c12_normal_means_risk() {
    criterion(12, "normal-means risk curves at p = 7", 300.0, [](std::ostringstream& detail) {
        const int p = 7;
        const int reps = 2000;
        // identity estimator
        Rng rng(121);
        std::vector<double> losses(reps);
        for (auto& l : losses) {
            double acc = 0.0;
            for (int i = 0; i < p; ++i) {
                const double z = rng.normal();
                acc += z * z;
            }
            l = acc;
        }
        const double risk0 = stats::mean(losses);
        const double se0 = stats::standard_error(losses);
        bool ok = std::abs(risk0 - p) <= 3.0 * se0;
        detail << " identity " << risk0 << "+-" << se0;

        const double rate1 = exp_rate_for(1.0);
        auto pc1 = [rate1](double s) { return rate1 * std::exp(-rate1 * s); };
        const RiskPoint tight0 = normal_means_risk(pc1, 0.0, p, reps, 7001);
        const RiskPoint tight10 = normal_means_risk(pc1, 10.0, p, reps, 7002);
        ok = ok && tight0.risk < 5.0 && tight10.risk > 7.0;
        detail << "; U=1 risk(0)=" << tight0.risk << " risk(10)=" << tight10.risk;

        const double rate5 = exp_rate_for(5.0);
        auto pc5 = [rate5](double s) { return rate5 * std::exp(-rate5 * s); };
        auto hc = [](double s) { return (2.0 / M_PI) / (1.0 + s * s); };
        double worst_sigma = 0.0;
        for (int x0 = 0; x0 <= 8; ++x0) {
            // common random numbers across the two priors
            const RiskPoint a = normal_means_risk(pc5, x0, p, reps, 9000 + x0);
            const RiskPoint b = normal_means_risk(hc, x0, p, reps, 9000 + x0);
            const double joint = std::hypot(a.se, b.se);
            worst_sigma = std::max(worst_sigma, std::abs(a.risk - b.risk) / joint);
        }
        detail << "; U=5 vs half-Cauchy worst |diff|/se " << worst_sigma;
        return ok && worst_sigma <= 3.0;
    });
}

void c13_sparsity_rate() {
    criterion(13, "oracle rate growth p / log p at fixed sparsity fraction", 60.0,
              [](std::ostringstream& detail) {
                  bool ok = true;
                  for (int p : {100, 1000, 10000}) {
                      const int s0 = static_cast<int>(0.3 * p);
                      const double l = oracle_lambda(p, s0, TailFamily::exponential);
                      const double ratio = l * std::log(static_cast<double>(p)) / p;
                      detail << " p=" << p << " ratio=" << ratio;
                      ok = ok && ratio >= 0.1 && ratio <= 10.0;
                  }
                  return ok;
              });
}

void c14_simulation_study() {
    criterion(14, "dof recovery: coverage and prior dominance", 600.0,
              [](std::ostringstream& detail) {
                  NuPriorSpec pc;
                  pc.kind = NuPriorSpec::Kind::pc;
                  pc.u = 10.0;
                  pc.alpha = 0.5;
                  NuPriorSpec exp5;
                  exp5.kind = NuPriorSpec::Kind::exponential;
                  exp5.mean = 5.0;

                  SimulationScenario sc;
                  sc.replicates = 100;
                  sc.prior = pc;

                  sc.sample_size = 10000;
                  sc.nu_true = 5.0;
                  const SimulationResult a = simulation_study(sc, 141);
                  detail << " cov(1e4,nu5)=" << a.coverage;

                  sc.sample_size = 1000;
                  sc.nu_true = 100.0;
                  const SimulationResult b = simulation_study(sc, 142);
                  detail << " cov(1e3,nu100)=" << b.coverage;

                  sc.sample_size = 100;
                  sc.nu_true = 100.0;
                  const SimulationResult c_pc = simulation_study(sc, 143);
                  sc.prior = exp5;
                  const SimulationResult c_exp = simulation_study(sc, 143);
                  detail << " exp5 median=" << c_exp.mixture_q50
                         << " pc q975=" << c_pc.mixture_q975;

                  return a.coverage >= 0.9 && b.coverage >= 0.9 && c_exp.mixture_q50 < 40.0 &&
                         c_pc.mixture_q975 > 100.0;
              });
}

void c15_reparameterisation() {
    criterion(15, "precision prior is invariant to the variance and log parameterisations", 1.0,
              [](std::ostringstream& detail) {
                  const double rate = 2.4;
                  const PrecisionPrior closed(rate);
                  // variance scale: v = 1/tau, distance sqrt(v)
                  DistanceFunction dist_v([](double v) { return std::sqrt(v); },
                                          Interval{0.0, kInf}, kInf);
                  PcPrior1d on_v(rate, dist_v);
                  // log-precision scale: x = log tau, distance e^{-x/2}
                  DistanceFunction dist_x([](double x) { return std::exp(-0.5 * x); },
                                          Interval{-kInf, kInf}, kInf);
                  PcPrior1d on_x(rate, dist_x);
                  double worst = 0.0;
                  for (int i = 0; i < 100; ++i) {
                      const double tau = std::pow(10.0, -3.0 + 6.0 * i / 99.0);
                      const double target = closed.density(tau);
                      const double via_v = on_v.density(1.0 / tau) / (tau * tau);
                      const double via_x = on_x.density(std::log(tau)) / tau;
                      worst = std::max(worst, std::abs(via_v / target - 1.0));
                      worst = std::max(worst, std::abs(via_x / target - 1.0));
                  }
                  detail << " worst rel err " << worst;
                  return worst <= 1e-6;
              });
}

}  // namespace

int main() {
    std::printf("acceptance suite (%u worker threads)\n", max_threads());
    c1_pipeline_equivalence();
    c2_marginal_sd_rule();
    c3_student_t_asymptotics();
    c4_overfitting_diagnostic();
    c5_univariate_normalizations();
    c6_foliated_gof();
    c7_correlation_prior();
    c8_levinson_durbin();
    c9_bym();
    c10_weights_prior();
    c11_shrinkage();
    c12_normal_means_risk();
    c13_sparsity_rate();
    c14_simulation_study();
    c15_reparameterisation();
    std::printf("%d of 15 criteria failed\n", g_failures);
    return g_failures;
}
