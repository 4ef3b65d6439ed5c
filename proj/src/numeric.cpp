#include "edfsim/numeric.hpp"

#include <charconv>

namespace edfsim {

std::string NumTraits<double>::format(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds −0 into 0
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);  // shortest round-trip form
    return std::string(buf, r.ptr);
}

Rational NumTraits<Rational>::from_double(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("cannot convert a non-finite value to a rational");
    int exponent = 0;
    double mantissa = std::frexp(x, &exponent);
    // Scale the mantissa to a 53-bit integer, then apply the binary exponent.
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational r(scaled);
    if (exponent > 0) {
        r *= Rational(boost::multiprecision::cpp_int(1) << exponent);
    } else if (exponent < 0) {
        r /= Rational(boost::multiprecision::cpp_int(1) << -exponent);
    }
    return r;
}

std::string NumTraits<Rational>::format(const Rational& x) {
    const auto num = boost::multiprecision::numerator(x);
    const auto den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace edfsim
