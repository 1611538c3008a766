#include <cmath>

#include "doctest.h"
#include "pcp/distance.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/rng.hpp"

using namespace pcp;

namespace {

DistanceFunction identity_distance() {
    return DistanceFunction([](double x) { return x; }, Interval{0.0, kInf}, kInf);
}

}  // namespace

TEST_CASE("kld_gaussian closed form") {
    const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(1, 1);

    CHECK(kld_gaussian(z1, i1, z1, i1) == doctest::Approx(0.0).epsilon(1e-14));

    // variance inflation: (1/2)(4 - 1 - ln 4)
    CHECK(kld_gaussian(z1, i1, z1, 4.0 * i1) ==
          doctest::Approx(0.8068528194400547).epsilon(1e-12));

    // pure mean shift in two dimensions
    const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd m2(2);
    m2 << 1.0, 0.0;
    const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK(kld_gaussian(z2, i2, m2, i2) == doctest::Approx(0.5).epsilon(1e-14));

    // Monte Carlo cross-check of E_f[log(f/g)] for the inflation case
    Rng rng(17);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * rng.normal();
        const double logf = -0.5 * (std::log(2.0 * M_PI * 4.0) + x * x / 4.0);
        const double logg = -0.5 * (std::log(2.0 * M_PI) + x * x);
        acc += logf - logg;
    }
    CHECK(acc / n == doctest::Approx(0.8068528194400547).epsilon(0.02));
}

TEST_CASE("kld_gaussian rejects bad input") {
    const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(2);
    const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(1, 1);
    const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(kld_gaussian(z1, i1, z2, i2), std::invalid_argument);
    CHECK_THROWS_AS(kld_gaussian(z1, -i1, z1, i1), std::domain_error);
}

TEST_CASE("distance_from_kld") {
    CHECK(distance_from_kld(0.0) == 0.0);
    CHECK(distance_from_kld(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(distance_from_kld(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(distance_from_kld(-1e-9), std::domain_error);
}

TEST_CASE("pc_density basic examples") {
    // d(xi) = xi, lambda = 1: exponential density at the base
    PcPrior1d expo(1.0, identity_distance());
    CHECK(expo.density(0.0) == doctest::Approx(1.0).epsilon(1e-8));

    // d(xi) = xi^2, lambda = 2 at xi = 1: change of variables gives 4 e^{-2};
    // no analytic derivative supplied, so this also exercises the finite
    // difference path
    DistanceFunction square([](double x) { return x * x; }, Interval{0.0, kInf}, kInf);
    PcPrior1d prior(2.0, square);
    CHECK(prior.density(1.0) == doctest::Approx(0.5413411329464508).epsilon(1e-9));

    CHECK_THROWS_AS(prior.density(-0.5), std::domain_error);
}

TEST_CASE("pc prior normalization and truncation") {
    // untruncated, two symmetric branches: (lambda/2) e^{-lambda |xi|}
    DistanceFunction two_sided(
        [](double x) { return std::abs(x); }, Interval{-kInf, kInf},
        {{-kInf, 0.0}, {0.0, kInf}}, kInf, [](double x) { return x < 0.0 ? -1.0 : 1.0; });
    PcPrior1d laplace(1.5, two_sided);
    CHECK(laplace.density(0.5) == doctest::Approx(0.75 * std::exp(-0.75)).epsilon(1e-12));
    const double mass =
        quad::integrate([&](double x) { return laplace.density(x); }, -60.0, 60.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

    // truncated: d(xi) = xi on [0, 1]
    DistanceFunction unit([](double x) { return x; }, Interval{0.0, 1.0}, 1.0,
                          [](double) { return 1.0; });
    PcPrior1d trunc(2.0, unit);
    CHECK(trunc.truncated());
    CHECK(trunc.normalizer() == doctest::Approx(1.0 / (1.0 - std::exp(-2.0))).epsilon(1e-14));
    const double tmass = quad::integrate([&](double x) { return trunc.density(x); }, 0.0, 1.0);
    CHECK(tmass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("prior_on_distance_scale round trips the pc prior") {
    DistanceFunction square([](double x) { return x * x; }, Interval{0.0, kInf}, kInf,
                            [](double x) { return 2.0 * x; });
    const double lambda = 0.7;
    PcPrior1d prior(lambda, square);
    std::vector<double> grid{0.05, 0.3, 1.0, 2.5, 6.0};
    const auto pushed =
        prior_on_distance_scale([&](double x) { return prior.density(x); }, square, grid);
    for (auto [d, val] : pushed) {
        CHECK(val == doctest::Approx(lambda * std::exp(-lambda * d)).epsilon(1e-9));
    }
}

TEST_CASE("prior_on_distance_scale sums branches") {
    // symmetric two-branch distance with a density that is not symmetric
    DistanceFunction two_sided(
        [](double x) { return std::abs(x); }, Interval{-kInf, kInf},
        {{-kInf, 0.0}, {0.0, kInf}}, kInf, [](double x) { return x < 0.0 ? -1.0 : 1.0; });
    auto dens = [](double x) {
        return x >= 0.0 ? 0.5 * std::exp(-x) : std::exp(2.0 * x);
    };
    const auto pushed = prior_on_distance_scale(dens, two_sided, {0.5, 1.0});
    for (auto [d, val] : pushed) {
        CHECK(val == doctest::Approx(0.5 * std::exp(-d) + std::exp(-2.0 * d)).epsilon(1e-9));
    }
}

TEST_CASE("prior_on_distance_scale rejects non-monotone branches") {
    DistanceFunction bump([](double x) { return std::sin(x); }, Interval{0.0, M_PI}, 1.0);
    CHECK_THROWS_AS(
        prior_on_distance_scale([](double) { return 1.0; }, bump, std::vector<double>{0.5}),
        NumericalError);
}

TEST_CASE("calibrate_rate on the exponential quantile") {
    TailCondition tail;
    tail.transform = [](double x) { return x; };
    tail.bound = 1.0;
    tail.mass = std::exp(-1.0);
    const double lambda = calibrate_rate(identity_distance(), tail);
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("calibrate_rate matches the closed form for the precision prior") {
    // d(tau) = tau^{-1/2}, event 1/sqrt(tau) > U
    DistanceFunction dist([](double t) { return 1.0 / std::sqrt(t); }, Interval{0.0, kInf}, kInf,
                          [](double t) { return -0.5 * std::pow(t, -1.5); });
    TailCondition tail;
    tail.transform = [](double t) { return 1.0 / std::sqrt(t); };
    tail.bound = 0.968;
    tail.mass = 0.01;
    const double lambda = calibrate_rate(dist, tail);
    CHECK(lambda == doctest::Approx(4.757407216929846).epsilon(1e-9));

    // tail statement round trip by quadrature of the calibrated density
    PcPrior1d prior(lambda, dist);
    const double prob = quad::integrate([&](double t) { return prior.density(t); }, 0.0,
                                        1.0 / (0.968 * 0.968), 1e-12, 1e-10);
    CHECK(prob == doctest::Approx(0.01).epsilon(1e-8));
}

TEST_CASE("calibrate_rate reports the attainable range when infeasible") {
    // truncated distance: Prob(xi > 0.5) can never exceed one half
    DistanceFunction unit([](double x) { return x; }, Interval{0.0, 1.0}, 1.0,
                          [](double) { return 1.0; });
    TailCondition tail;
    tail.transform = [](double x) { return x; };
    tail.bound = 0.5;
    tail.mass = 0.8;
    try {
        calibrate_rate(unit, tail);
        FAIL("expected FeasibilityError");
    } catch (const FeasibilityError& e) {
        CHECK(e.attainable_lo() < 1e-4);
        CHECK(e.attainable_hi() == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("reparameterisation invariance") {
    // exponential prior through xi = exp(u) - 1
    DistanceFunction direct([](double x) { return x; }, Interval{0.0, kInf}, kInf);
    DistanceFunction pulled([](double u) { return std::expm1(u); }, Interval{0.0, kInf}, kInf);
    const double lambda = 1.3;
    PcPrior1d p_direct(lambda, direct);
    PcPrior1d p_pulled(lambda, pulled);
    for (int i = 0; i < 100; ++i) {
        const double xi = 0.02 + 0.05 * i;
        const double u = std::log1p(xi);
        const double back = p_pulled.density(u) / (1.0 + xi);  // push to the xi scale
        CHECK(back == doctest::Approx(p_direct.density(xi)).epsilon(1e-6));
    }
}

TEST_CASE("mode of the distance density sits at the base and decays") {
    DistanceFunction square([](double x) { return x * x; }, Interval{0.0, kInf}, kInf,
                            [](double x) { return 2.0 * x; });
    PcPrior1d prior(0.9, square);
    const auto pushed = prior_on_distance_scale([&](double x) { return prior.density(x); }, square,
                                                {0.0, 0.3, 0.8, 1.7, 3.0, 5.0});
    for (std::size_t i = 1; i < pushed.size(); ++i) {
        CHECK(pushed[i].second < pushed[i - 1].second);
    }
}

TEST_CASE("generic sampler tracks the exponential distance law") {
    DistanceFunction square([](double x) { return x * x; }, Interval{0.0, kInf}, kInf,
                            [](double x) { return 2.0 * x; });
    PcPrior1d prior(2.0, square);
    Rng rng(99);
    double mean_d = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double xi = prior.sample(rng);
        mean_d += xi * xi;
    }
    mean_d /= n;
    CHECK(mean_d == doctest::Approx(0.5).epsilon(0.03));
}
