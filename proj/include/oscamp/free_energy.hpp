// Free energy F(h) = lim d^{-n} log f_n(e^h) and the Boettcher function
// B(x) = exp(F(log x)), via the convergent series
//   F(h) = log p_d/(d-1) + h + sum_i d^{-(i+1)} Q_log(f_i(e^h)).
#pragma once

#include <cmath>
#include <string>

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

/// U(x) = f(x) x^{-d} / p_d - 1 = sum_{i<d} p_i x^{i-d} / p_d.
template <class Real, class T>
T escape_deviation(const PinningMap<Real>& map, const T& x)
{
    const int d = map.degree();
    const T inv = T(1) / x;
    T acc(0);
    for (int i = 0; i < d; ++i) acc = (acc + T(map.p(i))) * inv;
    // acc = sum_i p_i x^{-(d-i)}
    return acc / T(map.p(d));
}

template <class Real>
Real q_log(const PinningMap<Real>& map, const Real& x)
{
    using std::log1p;
    return log1p(escape_deviation(map, x));
}

/// Smallest c >= 1 such that |U(z)| <= 1/2 and |f(z)| >= |z| for |z| >= c.
/// U is dominated by its real majorant U(|z|), which decreases in |z|.
template <class Real>
Real escape_radius(const PinningMap<Real>& map)
{
    using std::max;
    using std::pow;
    const int d = map.degree();
    const Real half(0.5);
    Real growth = pow(Real(2) / map.p(d), Real(1) / Real(d - 1));
    Real lo(1), hi(2);
    if (escape_deviation(map, lo) <= half) return max(Real(1), growth);
    while (escape_deviation(map, hi) > half) hi *= 2;
    for (int i = 0; i < 200; ++i) {
        Real mid = (lo + hi) / 2;
        if (escape_deviation(map, mid) > half)
            lo = mid;
        else
            hi = mid;
    }
    return max(max(hi, growth), Real(1));
}

struct FreeEnergyOptions
{
    int max_iterations = 10000;
};

/// F(h) to absolute accuracy `tol`. Exact zero for h <= 0.
template <class Real>
BoundedValue<Real> free_energy(const PinningMap<Real>& map, const Real& h, const Real& tol,
                               const FreeEnergyOptions& options = {})
{
    using std::abs;
    using std::exp;
    using std::log;
    using std::log1p;
    if (!(tol > 0)) throw invalid_argument_error("tolerance must be positive");
    if (h <= 0) return {Real(0), Real(0), true};

    const int d = map.degree();
    const Real dd(d);
    const Real radius = escape_radius(map);
    Real x = exp(h);
    Real weight = 1 / dd;  // d^{-(i+1)}
    Real sum(0), magnitude(0);
    int i = 0;
    for (;; ++i) {
        if (i > options.max_iterations)
            throw convergence_error("free energy: no escape after " + std::to_string(options.max_iterations) +
                                    " iterations; h is too small for the iteration cap");
        const Real term = q_log(map, x);
        // Orbit of x > 1 increases and U decreases along it, so the remaining
        // terms are bounded by the current one.
        const Real tail = weight * dd / (dd - 1) * term;
        if (x >= radius && tail <= tol / 2) {
            const Real base = log(map.p(d)) / (dd - 1) + h;
            const Real value = base + sum;
            Real round = Real(40) * rounding_allowance<Real>(static_cast<double>(i + 4), abs(base) + magnitude + abs(h));
            if (round > tol / 2)
                throw precision_error("free energy: tolerance " + full_string(tol) +
                                      " is below the rounding level of the working precision");
            return {value, tail + round, true};
        }
        sum += weight * term;
        magnitude += abs(weight * term);
        weight /= dd;
        x = map(x);
    }
}

/// B(x) = exp(F(log x)) for x >= 1.
template <class Real>
BoundedValue<Real> boettcher_B(const PinningMap<Real>& map, const Real& x, const Real& tol)
{
    using std::exp;
    using std::log;
    if (x < 1) throw domain_error("Boettcher function is evaluated for real x >= 1");
    if (x == 1) return {Real(1), Real(0), true};
    const Real logx = log(x);
    // relative tolerance on B translates to absolute tolerance on F
    const Real ftol = tol / (2 * x * map.p(map.degree()) + 1);
    auto F = free_energy(map, logx, ftol < tol ? ftol : tol);
    const Real value = exp(F.value);
    const Real err = exp(F.value + F.err) * F.err * Real(1.01) + rounding_allowance<Real>(8, value);
    return {value, err, F.certified};
}

}  // namespace oscamp
