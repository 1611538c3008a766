#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcp {

// Monotone cubic interpolant (Fritsch-Carlson limited Hermite slopes).
// Preserves monotone data exactly, which keeps tabulated distance curves
// invertible and their derivatives sign-stable.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: bad node arrays");
        m_.assign(n, 0.0);
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = x_[i + 1] - x_[i];
            if (h <= 0.0) throw std::invalid_argument("MonotoneCubic: nodes must increase");
            delta[i] = (y_[i + 1] - y_[i]) / h;
        }
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Clamp endpoint slopes so the interpolant stays monotone there too.
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double d = (i == 0) ? delta[0] : delta[n - 2];
            if (d == 0.0)
                m_[i] = 0.0;
            else if (m_[i] / d < 0.0)
                m_[i] = 0.0;
            else if (std::abs(m_[i]) > 3.0 * std::abs(d))
                m_[i] = 3.0 * d;
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double operator()(double x) const {
        const auto [i, t, h] = locate(x);
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double derivative(double x) const {
        const auto [i, t, h] = locate(x);
        const double t2 = t * t;
        const double g00 = (6 * t2 - 6 * t) / h;
        const double g10 = 3 * t2 - 4 * t + 1;
        const double g01 = (-6 * t2 + 6 * t) / h;
        const double g11 = 3 * t2 - 2 * t;
        return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
    }

private:
    struct Cell {
        std::size_t i;
        double t;
        double h;
    };

    Cell locate(double x) const {
        x = std::clamp(x, x_.front(), x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        return {i, (x - x_[i]) / h, h};
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace pcp
