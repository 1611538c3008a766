#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pcp {

namespace detail {
// splitmix64, used to whiten seeds and derive independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Seeded generator with explicitly coded variate transforms, so that a given
// (seed, call sequence) produces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(detail::splitmix64(s));
    }

    // Independent stream derived from (root, index); replicate-level work is
    // reproducible for any number of workers.
    static Rng substream(std::uint64_t root, std::uint64_t index) {
        std::uint64_t s = root;
        const std::uint64_t a = detail::splitmix64(s);
        s = a ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return Rng(detail::splitmix64(s));
    }

    std::uint64_t raw() { return engine_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller; two uniforms per draw, no cached spare.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double exponential(double rate = 1.0) { return -std::log(1.0 - uniform()) / rate; }

    // Marsaglia-Tsang for shape >= 1, boosted from shape+1 otherwise.
    double gamma(double shape, double scale = 1.0) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

    // Student-t with dof nu, rescaled to unit variance (requires nu > 2).
    double student_t_unit_variance(double nu) {
        const double z = normal();
        const double v = chi_squared(nu);
        return z / std::sqrt(v / nu) * std::sqrt((nu - 2.0) / nu);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pcp
