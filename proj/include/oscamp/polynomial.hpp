// Dense univariate polynomials stored low-degree first: p[i] is the
// coefficient of x^i.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "oscamp/real.hpp"

namespace oscamp::poly {

template <class Real>
using Poly = std::vector<Real>;

template <class Real>
void trim(Poly<Real>& p)
{
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

template <class Real, class T>
T horner(const Poly<Real>& p, const T& x)
{
    T acc(0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + T(p[i]);
    return acc;
}

template <class Real>
Poly<Real> add(const Poly<Real>& a, const Poly<Real>& b)
{
    Poly<Real> c(std::max(a.size(), b.size()), Real(0));
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    return c;
}

template <class Real>
Poly<Real> scale(Poly<Real> a, const Real& s)
{
    for (auto& c : a) c *= s;
    return a;
}

/// Product, optionally truncated to degree `max_degree`.
template <class Real>
Poly<Real> mul(const Poly<Real>& a, const Poly<Real>& b, std::size_t max_degree = static_cast<std::size_t>(-1))
{
    if (a.empty() || b.empty()) return {};
    const std::size_t n = std::min(a.size() + b.size() - 1, max_degree == static_cast<std::size_t>(-1) ? a.size() + b.size() - 1 : max_degree + 1);
    Poly<Real> c(n, Real(0));
    for (std::size_t i = 0; i < a.size() && i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

/// outer(inner(x)), optionally truncated.
template <class Real>
Poly<Real> compose(const Poly<Real>& outer, const Poly<Real>& inner,
                   std::size_t max_degree = static_cast<std::size_t>(-1))
{
    Poly<Real> result{Real(0)};
    for (std::size_t i = outer.size(); i-- > 0;) {
        result = mul(result, inner, max_degree);
        if (result.empty()) result.push_back(Real(0));
        result[0] += outer[i];
    }
    return result;
}

/// p(x / s)
template <class Real>
Poly<Real> rescale(Poly<Real> p, const Real& s)
{
    Real f(1);
    for (auto& c : p) {
        c /= f;
        f *= s;
    }
    return p;
}

template <class Real>
Poly<Real> derivative(const Poly<Real>& p)
{
    if (p.size() <= 1) return {Real(0)};
    Poly<Real> d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Real(static_cast<long>(i));
    return d;
}

/// Coefficients of p(x) from index `from` on, i.e. (p - low part) / x^from.
template <class Real>
Poly<Real> shift_down(const Poly<Real>& p, std::size_t from)
{
    if (from >= p.size()) return {Real(0)};
    return Poly<Real>(p.begin() + static_cast<std::ptrdiff_t>(from), p.end());
}

/// Sum of |c_i| r^i, the majorant norm on the disk of radius r.
template <class Real>
Real abs_norm(const Poly<Real>& p, const Real& r)
{
    using std::abs;
    Real acc(0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * r + abs(p[i]);
    return acc;
}

/// Range enclosure of p over [xl, xr] with 0 <= xl <= xr, obtained by
/// splitting p into its positive and negative coefficient parts, each of
/// which is monotone on the half line.
template <class Real>
std::pair<Real, Real> enclosure(const Poly<Real>& p, const Real& xl, const Real& xr)
{
    Real pos_l(0), pos_r(0), neg_l(0), neg_r(0);
    for (std::size_t i = p.size(); i-- > 0;) {
        pos_l *= xl;
        pos_r *= xr;
        neg_l *= xl;
        neg_r *= xr;
        if (p[i] > 0) {
            pos_l += p[i];
            pos_r += p[i];
        } else {
            neg_l -= p[i];
            neg_r -= p[i];
        }
    }
    Real slack = rounding_allowance<Real>(static_cast<double>(2 * p.size()), pos_r + neg_r);
    return {pos_l - neg_r - slack, pos_r - neg_l + slack};
}

/// Rigorous upper bound of |p| on [a, b], 0 <= a < b, from `pieces`
/// sub-interval enclosures.
template <class Real>
Real sup_abs(const Poly<Real>& p, const Real& a, const Real& b, int pieces = 2000)
{
    using std::abs;
    using std::max;
    Real best(0);
    const Real h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const Real xl = a + h * i;
        const Real xr = (i + 1 == pieces) ? b : a + h * (i + 1);
        auto [lo, hi] = enclosure(p, xl, xr);
        best = max(best, max(abs(lo), abs(hi)));
    }
    return best;
}

/// Rigorous lower bound of |p| on [a, b]; zero if an enclosure touches 0.
template <class Real>
Real inf_abs(const Poly<Real>& p, const Real& a, const Real& b, int pieces = 2000)
{
    using std::min;
    Real best(-1);
    const Real h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const Real xl = a + h * i;
        const Real xr = (i + 1 == pieces) ? b : a + h * (i + 1);
        auto [lo, hi] = enclosure(p, xl, xr);
        Real m = (lo > 0) ? lo : (hi < 0 ? Real(-hi) : Real(0));
        best = (best < 0) ? m : min(best, m);
    }
    return best < 0 ? Real(0) : best;
}

/// Rigorous upper bound of |p/q| on [a, b]. Returns a negative value when q
/// cannot be separated from zero on some piece.
template <class Real>
Real sup_abs_ratio(const Poly<Real>& p, const Poly<Real>& q, const Real& a, const Real& b, int pieces = 2000)
{
    using std::abs;
    using std::max;
    Real best(0);
    const Real h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const Real xl = a + h * i;
        const Real xr = (i + 1 == pieces) ? b : a + h * (i + 1);
        auto [plo, phi] = enclosure(p, xl, xr);
        auto [qlo, qhi] = enclosure(q, xl, xr);
        Real qmin = (qlo > 0) ? qlo : (qhi < 0 ? Real(-qhi) : Real(0));
        if (qmin <= 0) return Real(-1);
        best = max(best, max(abs(plo), abs(phi)) / qmin);
    }
    return best;
}

}  // namespace oscamp::poly
