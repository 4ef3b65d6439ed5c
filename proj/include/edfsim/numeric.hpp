#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace edfsim {

/// Exact rational arithmetic used by the optional exact mode.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

/// Absolute tolerance (work units) for zero-mass detection in floating mode.
inline constexpr double kMassEpsilon = 1e-9;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An internal identity that must hold by construction was found broken.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Numeric policy for the scalar type `Real` (either `double` or `Rational`).
template <class Real>
struct NumTraits;

template <>
struct NumTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "double";

    static double epsilon() { return kMassEpsilon; }
    static double from_double(double x) { return x; }
    static double to_double(double x) { return x; }
    static std::string format(double x);
};

template <>
struct NumTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";

    static Rational epsilon() { return Rational(0); }
    /// Exact conversion: every finite double is a dyadic rational.
    static Rational from_double(double x);
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    /// Integers print plainly, other values as `p/q`.
    static std::string format(const Rational& x);
};

template <class Real>
bool is_zero(const Real& x) {
    return abs(x) <= NumTraits<Real>::epsilon();
}

inline bool is_zero(double x) { return std::abs(x) <= kMassEpsilon; }

template <class Real>
Real min_of(const Real& a, const Real& b) { return b < a ? b : a; }

template <class Real>
Real max_of(const Real& a, const Real& b) { return a < b ? b : a; }

template <class Real>
Real positive_part(const Real& x) { return x < Real(0) ? Real(0) : x; }

/// Running sum that stays exact for `Rational` and uses Neumaier compensation
/// for `double`, so long simulations do not drift in their counters.
template <class Real>
class Accumulator {
public:
    void add(const Real& x) { sum_ += x; }
    Real value() const { return sum_; }

private:
    Real sum_{0};
};

template <>
class Accumulator<double> {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace edfsim
