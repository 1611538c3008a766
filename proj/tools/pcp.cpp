// pcp: batch front end for penalised-complexity prior construction.
// Subcommands: density, sample, calibrate, distance, kld, risk, simulate,
// selftest. All numeric output uses full round-trip precision; identical
// arguments and seed give byte-identical output.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcp/analysis.hpp"
#include "pcp/bym.hpp"
#include "pcp/multivariate.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/stats.hpp"
#include "pcp/univariate.hpp"

namespace {

using namespace pcp;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GridSpec {
    double lo = 0.0, hi = 1.0;
    int n = 101;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(s);
    if (!(in >> g.lo >> colon1 >> g.hi >> colon2 >> g.n) || colon1 != ':' || colon2 != ':' ||
        g.n < 1 || !(g.hi > g.lo)) {
        throw CLI::ValidationError("--grid", "expected a:b:n with n >= 1 and b > a");
    }
    return g;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

struct PriorOptions {
    std::string kind;
    std::optional<double> lambda;
    std::optional<double> tail_u;
    std::optional<double> tail_alpha;
    int m = 2;       // exchangeable block size
    int q = 3;       // correlation matrix dimension
    int p = 3;       // partial-correlation count
    int dim = 3;     // simplex/sphere dimension
    std::string structure_file;
    std::string graph_file;
    std::vector<std::string> cov_files;

    double rate_or(double fallback) const { return lambda.value_or(fallback); }

    void require_tail() const {
        if (!tail_u || !tail_alpha)
            throw CLI::ValidationError("calibrate", "needs --U and --alpha");
    }
    void check_exclusive() const {
        if (lambda && (tail_u || tail_alpha))
            throw CLI::ValidationError("prior", "--lambda and (--U, --alpha) are mutually exclusive");
    }
};

void add_prior_options(CLI::App* cmd, PriorOptions& opt) {
    cmd->add_option("--kind", opt.kind, "prior kind")
        ->required()
        ->check(CLI::IsMember({"precision", "student_t", "ar1_base0", "ar1_base1", "exch_corr",
                               "corr_matrix", "toeplitz", "bym", "weights", "simplex", "sphere"}));
    cmd->add_option("--lambda", opt.lambda, "penalisation rate");
    cmd->add_option("--U,--u", opt.tail_u, "tail bound");
    cmd->add_option("--alpha", opt.tail_alpha, "tail mass");
    cmd->add_option("--m", opt.m, "exchangeable block size");
    cmd->add_option("--q", opt.q, "correlation matrix dimension");
    cmd->add_option("--p", opt.p, "partial correlation count");
    cmd->add_option("--dim", opt.dim, "simplex/sphere dimension");
    cmd->add_option("--structure", opt.structure_file, "structure matrix triplet file");
    cmd->add_option("--graph", opt.graph_file, "adjacency list file");
    cmd->add_option("--cov", opt.cov_files, "component covariance file (repeatable)");
}

StructureModel load_structure(const PriorOptions& opt) {
    if (!opt.structure_file.empty()) return scale_structure(read_structure_file(opt.structure_file));
    if (!opt.graph_file.empty()) return scale_structure(read_graph_file(opt.graph_file));
    throw CLI::ValidationError("--kind bym", "needs --structure or --graph");
}

// scalar prior kinds share the (density at x, calibrated rate) interface
struct ScalarPrior {
    std::function<double(double)> density;
    double rate = 0.0;
};

ScalarPrior make_scalar_prior(const PriorOptions& opt) {
    ScalarPrior out;
    if (opt.kind == "precision") {
        PrecisionPrior prior = opt.lambda ? PrecisionPrior(*opt.lambda)
                                          : (opt.require_tail(),
                                             PrecisionPrior::calibrate(*opt.tail_u, *opt.tail_alpha));
        out.rate = prior.rate();
        out.density = [prior](double t) { return prior.density(t); };
    } else if (opt.kind == "student_t") {
        StudentTPrior prior = opt.lambda ? StudentTPrior(*opt.lambda)
                                         : (opt.require_tail(),
                                            StudentTPrior::calibrate(*opt.tail_u, *opt.tail_alpha));
        out.rate = prior.rate();
        out.density = [prior](double v) { return prior.density(v); };
    } else if (opt.kind == "ar1_base0" || opt.kind == "ar1_base1") {
        const Ar1Base base = opt.kind == "ar1_base0" ? Ar1Base::rho_zero : Ar1Base::rho_one;
        Ar1Prior prior =
            opt.lambda ? Ar1Prior(*opt.lambda, base)
                       : (opt.require_tail(), Ar1Prior::calibrate(base, *opt.tail_u, *opt.tail_alpha));
        out.rate = prior.rate();
        out.density = [prior](double r) { return prior.density(r); };
    } else if (opt.kind == "exch_corr") {
        double rate;
        if (opt.lambda) {
            rate = *opt.lambda;
        } else {
            opt.require_tail();
            ExchangeableCorrPrior probe(1.0, opt.m);
            TailCondition tail;
            tail.transform = [](double r) { return std::abs(r); };
            tail.bound = *opt.tail_u;
            tail.mass = *opt.tail_alpha;
            rate = calibrate_rate(probe.distance(), tail);
        }
        ExchangeableCorrPrior prior(rate, opt.m);
        out.rate = rate;
        out.density = [prior](double r) { return prior.density(r); };
    } else if (opt.kind == "bym") {
        const StructureModel model = load_structure(opt);
        double rate;
        if (opt.lambda) {
            rate = *opt.lambda;
        } else {
            opt.require_tail();
            rate = bym_calibrate(model, *opt.tail_u, *opt.tail_alpha);
        }
        auto prior = std::make_shared<MixingPrior>(model, rate);
        out.rate = rate;
        out.density = [prior](double phi) { return prior->density(phi); };
    } else {
        throw CLI::ValidationError("--kind", opt.kind + " has no scalar density");
    }
    return out;
}

int run_density(const PriorOptions& opt, const std::string& grid_spec) {
    const GridSpec grid = parse_grid(grid_spec);
    const ScalarPrior prior = make_scalar_prior(opt);
    std::printf("# kind=%s lambda=%s\n", opt.kind.c_str(), g17(prior.rate).c_str());
    std::printf("x,density\n");
    for (int i = 0; i < grid.n; ++i) {
        const double x =
            grid.n == 1 ? grid.lo : grid.lo + (grid.hi - grid.lo) * i / (grid.n - 1.0);
        std::printf("%s,%s\n", g17(x).c_str(), g17(prior.density(x)).c_str());
    }
    return 0;
}

int run_sample(const PriorOptions& opt, int n, std::uint64_t seed) {
    Rng rng(seed);
    if (opt.kind == "corr_matrix") {
        const double rate = opt.rate_or(1.0);
        CorrelationPcPrior prior(opt.q, rate);
        std::printf("# kind=corr_matrix lambda=%s seed=%" PRIu64 "\n", g17(rate).c_str(), seed);
        std::printf("q=%d\n", opt.q);
        for (int k = 0; k < n; ++k) {
            const CorrelationModel m = prior.sample(rng);
            std::string line;
            for (int i = 0; i < opt.q; ++i) {
                for (int j = 0; j < opt.q; ++j) {
                    if (i || j) line += ',';
                    line += g17(m.matrix(i, j));
                }
            }
            std::printf("%s\n", line.c_str());
        }
        return 0;
    }
    if (opt.kind == "toeplitz" || opt.kind == "simplex" || opt.kind == "sphere" ||
        opt.kind == "weights") {
        const double rate = opt.rate_or(1.0);
        std::function<Eigen::VectorXd()> draw;
        int cols = 0;
        if (opt.kind == "toeplitz") {
            auto prior = std::make_shared<ToeplitzPcPrior>(opt.p, rate);
            draw = [prior, &rng] { return prior->sample(rng); };
            cols = opt.p;
        } else if (opt.kind == "simplex") {
            auto prior = std::make_shared<SimplexPcPrior>(rate, opt.dim);
            draw = [prior, &rng] { return prior->sample(rng); };
            cols = opt.dim;
        } else if (opt.kind == "sphere") {
            auto prior = std::make_shared<SpherePcPrior>(rate, opt.dim);
            draw = [prior, &rng] { return prior->sample(rng); };
            cols = opt.dim;
        } else {
            if (opt.cov_files.size() < 2)
                throw CLI::ValidationError("--kind weights", "needs two or more --cov files");
            std::vector<Eigen::MatrixXd> covs;
            for (const auto& f : opt.cov_files) covs.push_back(read_structure_file(f));
            auto prior = std::make_shared<WeightsPcPrior>(covs, rate);
            draw = [prior, &rng] { return prior->sample_weights(rng); };
            cols = static_cast<int>(opt.cov_files.size());
        }
        std::printf("# kind=%s lambda=%s seed=%" PRIu64 "\n", opt.kind.c_str(), g17(rate).c_str(),
                    seed);
        for (int j = 0; j < cols; ++j) std::printf(j ? ",x%d" : "x%d", j + 1);
        std::printf("\n");
        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd v = draw();
            std::string line;
            for (int j = 0; j < cols; ++j) {
                if (j) line += ',';
                line += g17(v[j]);
            }
            std::printf("%s\n", line.c_str());
        }
        return 0;
    }

    // scalar kinds
    std::function<double()> draw;
    double rate = opt.rate_or(1.0);
    if (opt.kind == "precision") {
        PrecisionPrior prior = opt.lambda ? PrecisionPrior(*opt.lambda)
                                          : (opt.require_tail(),
                                             PrecisionPrior::calibrate(*opt.tail_u, *opt.tail_alpha));
        rate = prior.rate();
        draw = [prior, &rng] { return prior.sample(rng); };
    } else if (opt.kind == "ar1_base0" || opt.kind == "ar1_base1") {
        const Ar1Base base = opt.kind == "ar1_base0" ? Ar1Base::rho_zero : Ar1Base::rho_one;
        Ar1Prior prior(rate, base);
        draw = [prior, &rng] { return prior.sample(rng); };
    } else if (opt.kind == "exch_corr") {
        ExchangeableCorrPrior prior(rate, opt.m);
        draw = [prior, &rng] { return prior.sample(rng); };
    } else if (opt.kind == "student_t") {
        StudentTPrior prior(rate);
        PcPrior1d generic = prior.generic();
        draw = [generic, &rng] { return generic.sample(rng); };
    } else if (opt.kind == "bym") {
        const StructureModel model = load_structure(opt);
        auto prior = std::make_shared<MixingPrior>(model, rate);
        draw = [prior, &rng] { return prior->sample(rng); };
    } else {
        throw CLI::ValidationError("--kind", "sampling not supported for " + opt.kind);
    }
    std::printf("# kind=%s lambda=%s seed=%" PRIu64 "\n", opt.kind.c_str(), g17(rate).c_str(), seed);
    std::printf("value\n");
    for (int k = 0; k < n; ++k) std::printf("%s\n", g17(draw()).c_str());
    return 0;
}

int run_calibrate(const PriorOptions& opt) {
    opt.require_tail();
    const ScalarPrior prior = make_scalar_prior(opt);
    std::printf("# kind=%s U=%s alpha=%s\n", opt.kind.c_str(), g17(*opt.tail_u).c_str(),
                g17(*opt.tail_alpha).c_str());
    std::printf("lambda\n%s\n", g17(prior.rate).c_str());
    return 0;
}

int run_distance(const PriorOptions& opt, double value) {
    double d = 0.0;
    if (opt.kind == "precision") {
        d = 1.0 / std::sqrt(value);
    } else if (opt.kind == "student_t") {
        d = (*StudentTDistance::shared())(value);
    } else if (opt.kind == "ar1_base0") {
        d = Ar1Prior(1.0, Ar1Base::rho_zero).distance()(value);
    } else if (opt.kind == "ar1_base1") {
        d = Ar1Prior(1.0, Ar1Base::rho_one).distance()(value);
    } else if (opt.kind == "exch_corr") {
        d = ExchangeableCorrPrior(1.0, opt.m).distance_at(value);
    } else if (opt.kind == "bym") {
        d = bym_distance(load_structure(opt), value);
    } else {
        throw CLI::ValidationError("--kind", "distance not supported for " + opt.kind);
    }
    std::printf("distance\n%s\n", g17(d).c_str());
    return 0;
}

Eigen::VectorXd parse_mean(const std::string& csv, Eigen::Index dim) {
    if (csv.empty()) return Eigen::VectorXd::Zero(dim);
    const std::vector<double> v = parse_list(csv);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int run_kld(const std::string& cov0_file, const std::string& cov1_file, const std::string& mean0,
            const std::string& mean1) {
    const Eigen::MatrixXd cov0 = read_structure_file(cov0_file);
    const Eigen::MatrixXd cov1 = read_structure_file(cov1_file);
    const Eigen::VectorXd m0 = parse_mean(mean0, cov0.rows());
    const Eigen::VectorXd m1 = parse_mean(mean1, cov1.rows());
    const double kld = kld_gaussian(m0, cov0, m1, cov1);
    std::printf("kld,distance\n%s,%s\n", g17(kld).c_str(), g17(distance_from_kld(kld)).c_str());
    return 0;
}

int run_risk(int p, const std::string& x0_list, int replicates, const std::string& prior_name,
             double u, double alpha, std::uint64_t seed) {
    std::function<double(double)> dens;
    if (prior_name == "pc") {
        const double rate = -std::log(alpha) / u;
        dens = [rate](double s) { return rate * std::exp(-rate * s); };
    } else if (prior_name == "half_cauchy") {
        dens = [](double s) { return (2.0 / M_PI) / (1.0 + s * s); };
    } else {
        throw CLI::ValidationError("--prior", "expected pc or half_cauchy");
    }
    std::printf("# risk p=%d prior=%s replicates=%d seed=%" PRIu64 "\n", p, prior_name.c_str(),
                replicates, seed);
    std::printf("x0_norm,risk,se\n");
    for (double x0 : parse_list(x0_list)) {
        const RiskPoint pt = normal_means_risk(dens, x0, p, replicates, seed);
        std::printf("%s,%s,%s\n", g17(pt.x0_norm).c_str(), g17(pt.risk).c_str(),
                    g17(pt.se).c_str());
    }
    return 0;
}

std::map<std::string, std::string> parse_config(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

int run_simulate(const std::map<std::string, std::string>& cfg) {
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = cfg.find(key);
        return it == cfg.end() ? fallback : it->second;
    };
    const std::vector<double> ns = parse_list(get("n", "100,1000,10000"));
    const bool full = get("full_grid", "0") == "1";
    const std::vector<double> nus = parse_list(get("nu", full ? "5,10,20,100" : "5,100"));
    const int replicates = static_cast<int>(std::stod(get("replicates", "100")));
    const std::uint64_t seed = static_cast<std::uint64_t>(std::stoll(get("seed", "1")));
    const int grid_nodes = static_cast<int>(std::stod(get("grid_nodes", "200")));

    NuPriorSpec prior;
    const std::string kind = get("prior", "pc");
    if (kind == "pc") {
        prior.kind = NuPriorSpec::Kind::pc;
        prior.u = std::stod(get("U", "10"));
        prior.alpha = std::stod(get("alpha", "0.5"));
    } else if (kind == "exponential") {
        prior.kind = NuPriorSpec::Kind::exponential;
        prior.mean = std::stod(get("mean", "5"));
    } else if (kind == "uniform") {
        prior.kind = NuPriorSpec::Kind::uniform;
        prior.upper = std::stod(get("upper", "100"));
    } else {
        throw CLI::ValidationError("--prior", "expected pc, exponential or uniform");
    }

    std::printf("# simulate prior=%s replicates=%d seed=%" PRIu64 "\n", kind.c_str(), replicates,
                seed);
    std::printf("scenario,n,nu_true,prior,quantity,value\n");
    int index = 0;
    for (double nu : nus) {
        for (double n : ns) {
            SimulationScenario sc;
            sc.sample_size = static_cast<int>(n);
            sc.nu_true = nu;
            sc.prior = prior;
            sc.replicates = replicates;
            sc.grid = NuGrid::log_spaced(2.01, 1e5, grid_nodes);
            const SimulationResult res = simulation_study(sc, seed + index);
            auto row = [&](const char* what, double v) {
                std::printf("%d,%d,%s,%s,%s,%s\n", index, sc.sample_size, g17(nu).c_str(),
                            kind.c_str(), what, g17(v).c_str());
            };
            row("q0.025", res.mixture_q025);
            row("q0.5", res.mixture_q50);
            row("q0.975", res.mixture_q975);
            row("coverage", res.coverage);
            ++index;
        }
    }
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        std::printf("%s - %s\n", ok ? "ok" : "FAIL", name);
        if (!ok) ++failures;
    };

    {
        PrecisionPrior prior(1.7);
        PcPrior1d generic = prior.generic();
        bool ok = true;
        for (double t = 1e-3; t <= 1e3; t *= 4.7) {
            ok = ok && std::abs(generic.density(t) / prior.density(t) - 1.0) < 1e-6;
        }
        report("precision prior equals generic pipeline", ok);
    }
    {
        Ar1Prior prior(1.0, Ar1Base::rho_zero);
        const double mass = quad::integrate_singular(
            [&](double r) { return prior.density(r); }, -1.0 + 1e-14, 1.0 - 1e-14, 1e-10);
        report("ar1 base-0 density integrates to one", std::abs(mass - 1.0) < 1e-6);
    }
    {
        Rng rng(77);
        bool ok = true;
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd phi(4);
            for (int i = 0; i < 4; ++i) phi[i] = rng.uniform(-0.95, 0.95);
            Eigen::VectorXd psi, s;
            levinson_durbin(phi, &psi, &s);
            ok = ok && (partials_from_autocorrelations(s) - phi).cwiseAbs().maxCoeff() < 1e-12;
        }
        report("levinson-durbin round trip", ok);
    }
    {
        CorrelationPcPrior prior(4, 0.3);
        Rng rng(5);
        bool ok = true;
        for (int k = 0; k < 200; ++k) {
            const CorrelationModel m = prior.sample(rng);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.matrix);
            ok = ok && eig.eigenvalues().minCoeff() >= -1e-12;
            const double gamma_sum = -m.angles.array().sin().log().sum();
            ok = ok && std::abs(-std::log(m.matrix.determinant()) - 2.0 * gamma_sum) < 1e-10;
        }
        report("correlation draws valid with determinant identity", ok);
    }
    {
        SimplexPcPrior prior(2.0, 3);
        Rng rng(6);
        std::vector<double> d(5000);
        for (double& v : d) v = prior.distance(prior.sample(rng));
        const double pval =
            stats::ks_test_pvalue(d, [](double x) { return 1.0 - std::exp(-2.0 * x); });
        report("simplex distance law exponential", pval > 0.001);
    }
    {
        Rng rng(7);
        Eigen::MatrixXd a(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) a(i, j) = rng.normal();
        const StructureModel model =
            scale_structure(a * a.transpose() / 6 + Eigen::MatrixXd::Identity(6, 6));
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
        bool ok = true;
        for (double phi : {0.2, 0.8}) {
            const Eigen::MatrixXd cov = (1.0 - phi) * eye + phi * model.matrix.inverse();
            const double oracle = 2.0 * kld_gaussian(zero, eye, zero, cov);
            const double d = bym_distance(model, phi);
            ok = ok && std::abs(d * d - oracle) < 1e-10;
        }
        report("mixing distance matches divergence oracle", ok);
    }
    return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalised-complexity prior toolbox"};
    app.require_subcommand(1);

    PriorOptions opt;
    std::string grid_spec = "0.01:10:100";
    int n_draws = 100;
    std::uint64_t seed = 1;
    double value = 0.5;
    std::string cov0_file, cov1_file, mean0_csv, mean1_csv;
    int risk_p = 7;
    std::string risk_x0 = "0,1,2,3,4,5,6,7,8";
    int risk_reps = 2000;
    std::string risk_prior = "pc";
    double risk_u = 5.0, risk_alpha = 0.01;
    std::string config_file;
    std::vector<std::string> overrides;

    auto* density = app.add_subcommand("density", "tabulate a prior density over a grid");
    add_prior_options(density, opt);
    density->add_option("--grid", grid_spec, "a:b:n inclusive grid");

    auto* sample = app.add_subcommand("sample", "draw from a prior");
    add_prior_options(sample, opt);
    sample->add_option("--n", n_draws, "number of draws");
    sample->add_option("--seed", seed, "rng seed");

    auto* calibrate = app.add_subcommand("calibrate", "rate from a tail statement");
    add_prior_options(calibrate, opt);

    auto* distance = app.add_subcommand("distance", "distance from the base model");
    add_prior_options(distance, opt);
    distance->add_option("--value", value, "parameter value")->required();

    auto* kld = app.add_subcommand("kld", "Gaussian Kullback-Leibler divergence");
    kld->add_option("--cov0", cov0_file, "base covariance (triplet file)")->required();
    kld->add_option("--cov1", cov1_file, "flexible covariance (triplet file)")->required();
    kld->add_option("--mean0", mean0_csv, "base mean, comma separated");
    kld->add_option("--mean1", mean1_csv, "flexible mean, comma separated");

    auto* risk = app.add_subcommand("risk", "normal-means risk curve");
    risk->add_option("--p", risk_p, "dimension");
    risk->add_option("--x0", risk_x0, "signal norms, comma separated");
    risk->add_option("--replicates", risk_reps, "Monte Carlo replicates per point");
    risk->add_option("--prior", risk_prior, "pc or half_cauchy");
    risk->add_option("--U", risk_u, "pc tail bound");
    risk->add_option("--alpha", risk_alpha, "pc tail mass");
    risk->add_option("--seed", seed, "rng seed");

    auto* simulate = app.add_subcommand("simulate", "dof recovery study, CSV output");
    simulate->add_option("--config", config_file, "key=value scenario file");
    simulate->add_option("--set", overrides, "key=value override (repeatable)");

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        opt.check_exclusive();
        if (density->parsed()) return run_density(opt, grid_spec);
        if (sample->parsed()) return run_sample(opt, n_draws, seed);
        if (calibrate->parsed()) return run_calibrate(opt);
        if (distance->parsed()) return run_distance(opt, value);
        if (kld->parsed()) return run_kld(cov0_file, cov1_file, mean0_csv, mean1_csv);
        if (risk->parsed())
            return run_risk(risk_p, risk_x0, risk_reps, risk_prior, risk_u, risk_alpha, seed);
        if (simulate->parsed()) {
            std::map<std::string, std::string> cfg;
            if (!config_file.empty()) cfg = parse_config(config_file);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set", "expected key=value");
                cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            return run_simulate(cfg);
        }
        if (selftest->parsed()) return run_selftest();
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const FeasibilityError& e) {
        std::fprintf(stderr, "infeasible: %s (attainable range [%s, %s])\n", e.what(),
                     g17(e.attainable_lo()).c_str(), g17(e.attainable_hi()).c_str());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
