// The polynomial pinning map f(x) = sum p_i x^i, its iterates and the
// conjugations used by the rest of the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "oscamp/errors.hpp"
#include "oscamp/polynomial.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

template <class T>
struct Orbit
{
    T value{};
    int steps = 0;
    bool escaped = false;
};

template <class Real>
class PinningMap
{
public:
    /// Validates and builds the map from exact weights p_0..p_d. Weights whose
    /// sum differs from one by less than `sum_tolerance` are renormalized.
    static PinningMap from_rationals(std::vector<rational> weights, double sum_tolerance = 1e-12)
    {
        if (weights.size() < 3)
            throw invalid_map_error("need at least three weights p0..pd with d >= 2, got " +
                                    std::to_string(weights.size()));
        rational sum(0);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0) throw invalid_map_error("weight p" + std::to_string(i) + " is negative");
            sum += weights[i];
        }
        const rational gap = sum > 1 ? rational(sum - 1) : rational(1 - sum);
        if (gap > rational_from_double(sum_tolerance))
            throw invalid_map_error("weights sum to " + sum.str() + ", not 1");
        if (sum != 1)
            for (auto& p : weights) p /= sum;
        if (weights.back() == 0) throw invalid_map_error("leading weight p_d must be positive");
        rational mean(0);
        for (std::size_t i = 1; i < weights.size(); ++i) mean += weights[i] * static_cast<long>(i);
        if (mean <= 1) throw invalid_map_error("mean offspring w = " + mean.str() + " must exceed 1");
        return PinningMap(std::move(weights), mean);
    }

    static PinningMap from_strings(const std::vector<std::string>& weights)
    {
        std::vector<rational> q;
        q.reserve(weights.size());
        for (const auto& s : weights) q.push_back(parse_rational(s));
        return from_rationals(std::move(q));
    }

    static PinningMap from_doubles(const std::vector<double>& weights)
    {
        std::vector<rational> q;
        q.reserve(weights.size());
        for (double x : weights) q.push_back(rational_from_double(x));
        return from_rationals(std::move(q));
    }

    int degree() const { return static_cast<int>(p_.size()) - 1; }
    const std::vector<Real>& weights() const { return p_; }
    const std::vector<rational>& exact_weights() const { return exact_; }
    const Real& p(int i) const { return p_.at(static_cast<std::size_t>(i)); }

    /// Mean offspring number f'(1).
    const Real& w() const { return w_; }
    /// log d / log w. Not available in exact rational mode.
    Real gamma() const
    {
        using std::log;
        return log(Real(degree())) / log(w_);
    }
    /// 2 - w (d = 2).
    const Real& lambda() const
    {
        require_quadratic();
        return lambda_;
    }
    /// p2 lambda / (1 - lambda)^2.
    Real c_lambda() const
    {
        require_quadratic();
        return p_[2] * lambda_ / ((1 - lambda_) * (1 - lambda_));
    }
    /// p2 / (2 - w).
    Real c_frak() const
    {
        require_quadratic();
        return p_[2] / lambda_;
    }
    Real stable_fixed_point() const
    {
        require_quadratic();
        return p_[0] / p_[2];
    }

    void require_quadratic() const
    {
        if (degree() != 2) throw domain_error("operation requires degree d = 2, map has d = " + std::to_string(degree()));
    }

    template <class T>
    T operator()(const T& x) const
    {
        return poly::horner(p_, x);
    }

    template <class T>
    T derivative(const T& x) const
    {
        return poly::horner(dp_, x);
    }

    /// Coefficients a_k of f(1 + u) = 1 + sum_{k>=1} a_k u^k.
    std::vector<Real> shifted_at_one() const
    {
        std::vector<Real> a(p_.size(), Real(0));
        // binomial expansion of p_i (1 + u)^i
        for (std::size_t i = 0; i < p_.size(); ++i) {
            Real binom(1);
            for (std::size_t k = 0; k <= i; ++k) {
                a[k] += p_[i] * binom;
                binom = binom * Real(static_cast<long>(i - k)) / Real(static_cast<long>(k + 1));
            }
        }
        return a;
    }

private:
    PinningMap(std::vector<rational> exact, const rational& mean) : exact_(std::move(exact))
    {
        for (const auto& q : exact_) p_.push_back(from_rational<Real>(q));
        w_ = from_rational<Real>(mean);
        lambda_ = Real(2) - w_;
        dp_ = poly::derivative(p_);
    }

    std::vector<rational> exact_;
    std::vector<Real> p_;
    std::vector<Real> dp_;
    Real w_{};
    Real lambda_{};
};

namespace detail {

template <class T>
auto magnitude_squared(const T& x)
{
    if constexpr (requires { x.imag(); })
        return x.real() * x.real() + x.imag() * x.imag();
    else
        return x * x;
}

}  // namespace detail

/// f_n(x). Stops early and flags escape once |x| exceeds `threshold`.
template <class Real, class T>
Orbit<T> iterate(const PinningMap<Real>& map, T x, int n, double threshold = 1e30)
{
    if (n < 0) throw invalid_argument_error("iteration count must be non-negative");
    Orbit<T> orbit{x, 0, false};
    const auto t2 = threshold * threshold;
    for (int i = 0; i < n; ++i) {
        orbit.value = map(orbit.value);
        orbit.steps = i + 1;
        if (detail::magnitude_squared(orbit.value) > decltype(detail::magnitude_squared(orbit.value))(t2)) {
            orbit.escaped = true;
            break;
        }
    }
    return orbit;
}

/// l(x) = (p0 - p2 x) / lambda; conjugates f to z -> lambda z (1 - z).
template <class Real, class T>
T to_logistic(const PinningMap<Real>& map, const T& x)
{
    map.require_quadratic();
    return (T(map.p(0)) - T(map.p(2)) * x) / T(map.lambda());
}

template <class Real, class T>
T logistic(const Real& lambda, const T& z)
{
    return T(lambda) * z * (T(1) - z);
}

/// q(x) = -1 / l(x); conjugates f to y -> y^2 / (lambda (1 + y)).
template <class Real, class T>
T q_transform(const PinningMap<Real>& map, const T& x)
{
    const T l = to_logistic(map, x);
    if (l == T(0)) throw domain_error("q has a pole at the stable fixed point p0/p2");
    return T(-1) / l;
}

template <class Real, class T>
T q_inverse(const PinningMap<Real>& map, const T& y)
{
    map.require_quadratic();
    if (y == T(0)) throw domain_error("q^{-1} has a pole at y = 0");
    return (T(map.p(0)) + T(map.lambda()) / y) / T(map.p(2));
}

template <class Real, class T>
T inverted_map(const Real& lambda, const T& y)
{
    return y * y / (T(lambda) * (T(1) + y));
}

/// delta(h) = lambda/(1-lambda) - q(e^h), in a form free of cancellation for small h.
template <class Real>
Real delta_of_h(const PinningMap<Real>& map, const Real& h)
{
    using std::exp;
    using std::expm1;
    const Real& lam = map.lambda();
    const Real p0 = map.p(0), p2 = map.p(2);
    const Real em1 = expm1(h);
    const Real denom = (1 - lam) * (p2 * exp(h) - p0);
    if (denom == 0) throw domain_error("delta(h) has a pole at e^h = p0/p2");
    return lam * p2 * em1 / denom;
}

/// v(delta) = ((1-lambda)/lambda)^2 delta + O(delta^2), the argument of g^{-1}.
template <class Real>
Real v_of_delta(const Real& lambda, const Real& delta)
{
    const Real denom = lambda * (lambda - (1 - lambda) * delta);
    if (denom <= 0) throw domain_error("delta must be below lambda/(1-lambda)");
    return (1 - lambda) * (1 - lambda) * delta / denom;
}

}  // namespace oscamp
