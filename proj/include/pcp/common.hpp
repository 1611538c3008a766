#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace pcp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval of valid parameter values. Open endpoints are handled by
// convention: densities at measure-zero boundary degeneracies return 0.
struct Interval {
    double lo;
    double hi;

    bool contains(double x) const { return x >= lo && x <= hi; }
    double width() const { return hi - lo; }
};

// A tail statement (U, alpha) cannot be met by any rate in the search range.
// Carries the attainable probability range so callers can report it.
class FeasibilityError : public std::runtime_error {
public:
    FeasibilityError(const std::string& what, double attainable_lo, double attainable_hi)
        : std::runtime_error(what), lo_(attainable_lo), hi_(attainable_hi) {}

    double attainable_lo() const { return lo_; }
    double attainable_hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

// Quadrature failure, non-convergent iteration, or an internal consistency
// check tripping outside tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pcp
