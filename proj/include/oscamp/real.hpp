// Multiprecision scalar types and small numeric helpers shared by every module.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "oscamp/errors.hpp"

namespace oscamp {

/// Runtime-precision binary float backed by MPFR. Precision is taken from
/// `mp_real::default_precision()` (decimal digits) at construction time.
using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

/// Exact rational, used for symbolic-grade coefficient checks.
using rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

inline constexpr unsigned default_digits = 60;

template <class T>
inline constexpr bool is_mp_v = boost::multiprecision::is_number<T>::value;

/// Sets the working precision for the lifetime of the object and restores the
/// previous value afterwards. The precision is process-global; do not change it
/// while other threads are computing.
class precision_scope
{
public:
    explicit precision_scope(unsigned digits) : saved_(mp_real::default_precision())
    {
        mp_real::default_precision(digits);
    }
    ~precision_scope() { mp_real::default_precision(saved_); }
    precision_scope(const precision_scope&) = delete;
    precision_scope& operator=(const precision_scope&) = delete;

private:
    unsigned saved_;
};

/// Digits requested through the OSCAMP_DIGITS environment variable, if any.
inline unsigned digits_from_environment(unsigned fallback = default_digits)
{
    const char* env = std::getenv("OSCAMP_DIGITS");
    if (env == nullptr) return fallback;
    unsigned value = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < 20 || value > 2000)
        throw invalid_argument_error("OSCAMP_DIGITS must be an integer in [20, 2000]");
    return value;
}

/// Unit roundoff of the current working precision.
template <class Real>
Real working_epsilon()
{
    if constexpr (is_mp_v<Real>) {
        Real one(1);
        const long bits = static_cast<long>(mpfr_get_prec(one.backend().data()));
        return ldexp(one, static_cast<int>(1 - bits));
    } else {
        return std::numeric_limits<Real>::epsilon();
    }
}

template <class Real>
Real pi_constant()
{
    using std::atan;
    return 4 * atan(Real(1));
}

template <class Real>
Real ln2_constant()
{
    using std::log;
    return log(Real(2));
}

/// Rounding allowance for a computation of `ops` elementary operations whose
/// intermediate magnitudes are bounded by `scale`.
template <class Real>
Real rounding_allowance(double ops, const Real& scale)
{
    using std::abs;
    return Real(16 * (ops + 4)) * working_epsilon<Real>() * (abs(scale) + 1);
}

template <class Real>
double to_double(const Real& x)
{
    return static_cast<double>(x);
}

/// Parses "3", "-0.25", "1/4", "2.5e-3" into an exact rational.
inline rational parse_rational(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) throw invalid_argument_error("empty number");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const rational num = parse_rational(text.substr(0, slash));
        const rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw invalid_argument_error("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }

    bool negative = false;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            throw invalid_argument_error("malformed number '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) throw invalid_argument_error("malformed number '" + std::string(text) + "'");
    if (i < text.size()) {
        const std::string_view exp_text = text.substr(i + 1);
        long e = 0;
        std::size_t start = (!exp_text.empty() && exp_text.front() == '+') ? 1 : 0;
        auto [ptr, ec] = std::from_chars(exp_text.data() + start, exp_text.data() + exp_text.size(), e);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size() || e > 4000 || e < -4000)
            throw invalid_argument_error("malformed exponent in '" + std::string(text) + "'");
        exponent += e;
    }
    // a leading zero would select octal
    const auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    boost::multiprecision::mpz_int mantissa(digits);
    boost::multiprecision::mpz_int ten_pow = boost::multiprecision::pow(
        boost::multiprecision::mpz_int(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    rational value = exponent >= 0 ? rational(mantissa * ten_pow) : rational(mantissa, ten_pow);
    return negative ? rational(-value) : value;
}

/// Shortest round-trip decimal form of a double, read back as an exact rational.
/// Used for JSON numbers so that 0.1 means one tenth, not its binary neighbour.
inline rational rational_from_double(double x)
{
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
    if (ec != std::errc{}) throw invalid_argument_error("cannot format number");
    return parse_rational(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

template <class Real>
Real from_rational(const rational& q)
{
    if constexpr (std::is_same_v<Real, rational>) {
        return q;
    } else if constexpr (is_mp_v<Real>) {
        return Real(q);
    } else {
        return static_cast<Real>(q);
    }
}

/// Full-precision scientific string (no rounding for display).
template <class Real>
std::string full_string(const Real& x)
{
    if constexpr (is_mp_v<Real>) {
        return x.str(0, std::ios_base::scientific);
    } else {
        char buffer[64];
        auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
        return std::string(buffer, ptr);
    }
}

}  // namespace oscamp
