// Truncated series for the Poincare-type function g (g(wx) = A_quad(g(x))),
// its inverse, and the Laurent series phi (phi(y^2) = lambda phi(y)(1 + phi(y))),
// with remainder envelopes |r(x)| <= C x^k certified by a fixed-point
// argument on a ball of functions.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/polynomial.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

enum class SeriesKind { taylor, laurent };

/// The data of the inequality that was checked when an envelope was installed.
template <class Real>
struct Certificate
{
    Real a{};            // radius of the function ball in units of `anchor`
    Real eps{};          // interval [0, eps]
    Real anchor{};       // |Q_resid(0)| for g, |p0(0)|/2 for phi
    Real margin{};       // c_eps (g) or C_eps (phi), must be > 0
    Real lhs{};          // checked: lhs <= rhs
    Real rhs{};
    Real contraction{};  // Lipschitz constant of the fixed-point map, < 1
};

/// |remainder(x)| <= C |x|^k for 0 <= x <= x0.
template <class Real>
struct Envelope
{
    Real C{};
    int k = 0;
    Real x0{};
    std::optional<Certificate<Real>> certificate;
};

template <class Real>
struct BoundedSeries
{
    SeriesKind kind = SeriesKind::taylor;
    int order = 0;
    /// Taylor: coeffs[j] multiplies x^j. Laurent: coeffs[j] multiplies x^{j-1}.
    std::vector<Real> coeffs;
    std::optional<Envelope<Real>> envelope;

    bool positive() const
    {
        for (const auto& c : coeffs)
            if (c < 0) return false;
        return true;
    }

    template <class T>
    T eval(const T& x) const
    {
        if (kind == SeriesKind::taylor) return poly::horner(coeffs, x);
        if (x == T(0)) throw domain_error("Laurent series has a pole at 0");
        return poly::horner(coeffs, x) / x;
    }

    const Envelope<Real>& require_envelope() const
    {
        if (!envelope) throw certification_error("series has no certified remainder envelope");
        return *envelope;
    }

    Real remainder_bound(const Real& x) const
    {
        using std::abs;
        using std::pow;
        const auto& env = require_envelope();
        if (abs(x) > env.x0) throw domain_error("argument outside the certified interval of the envelope");
        return env.C * pow(abs(x), env.k);
    }
};

// ---------------------------------------------------------------------------
// elementary maps

template <class Real, class T>
T A_quad(const Real& w, const Real& lambda, const T& y)
{
    return T(w) * y + T(lambda) * y * y;
}

/// Inverse of A_quad on [0, inf).
template <class Real>
Real A_inv(const Real& w, const Real& lambda, const Real& y)
{
    using std::sqrt;
    // (sqrt(4 y lambda + w^2) - w) / (2 lambda), rationalized
    return 2 * y / (sqrt(4 * y * lambda + w * w) + w);
}

template <class Real, class T>
T P_quad(const Real& lambda, const T& x)
{
    return T(lambda) * x * (T(1) + x);
}

/// Positive inverse of P_quad on [0, inf).
template <class Real>
Real Q_sqrt(const Real& lambda, const Real& x)
{
    using std::sqrt;
    // (sqrt(1 + 4x/lambda) - 1) / 2, rationalized
    const Real t = 4 * x / lambda;
    return t / (2 * (sqrt(1 + t) + 1));
}

// ---------------------------------------------------------------------------
// g

/// Coefficients of g with g_1 = 1 through order n, from
/// g_j (w^j - w) = lambda sum_{i=1}^{j-1} g_i g_{j-i}.
template <class Real>
BoundedSeries<Real> expand_g(const Real& w, const Real& lambda, int n)
{
    if (n < 2) throw invalid_argument_error("series order must be at least 2");
    if (!(w > 1)) throw invalid_map_error("expansion requires w > 1");
    BoundedSeries<Real> s;
    s.kind = SeriesKind::taylor;
    s.order = n;
    s.coeffs.assign(static_cast<std::size_t>(n) + 1, Real(0));
    s.coeffs[1] = 1;
    Real wj = w;
    for (int j = 2; j <= n; ++j) {
        wj *= w;
        Real acc(0);
        for (int i = 1; i < j; ++i) acc += s.coeffs[static_cast<std::size_t>(i)] * s.coeffs[static_cast<std::size_t>(j - i)];
        s.coeffs[static_cast<std::size_t>(j)] = lambda * acc / (wj - w);
    }
    return s;
}

template <class Real>
BoundedSeries<Real> expand_g(const PinningMap<Real>& map, int n)
{
    map.require_quadratic();
    return expand_g(map.w(), map.lambda(), n);
}

/// Residual data of a truncation g_n: writing g = g_n + x^{n+1} q, q solves
///   q(x) = Q(x) + p(x) q(x/w) + lambda w^{-2(n+1)} x^{n+1} q(x/w)^2.
template <class Real>
struct GResidual
{
    poly::Poly<Real> Q;  // (w g_n(x/w) + lambda g_n(x/w)^2 - g_n(x)) / x^{n+1}
    poly::Poly<Real> p;  // w^{-n} + 2 lambda w^{-n-1} g_n(x/w)
    Real Q0{};
};

template <class Real>
GResidual<Real> g_residual(const BoundedSeries<Real>& g, const Real& w, const Real& lambda)
{
    using std::abs;
    const int n = g.order;
    const auto gw = poly::rescale(g.coeffs, w);
    auto E = poly::add(poly::scale(gw, w), poly::scale(poly::mul(gw, gw), lambda));
    E = poly::add(E, poly::scale(g.coeffs, Real(-1)));
    GResidual<Real> r;
    r.Q = poly::shift_down(E, static_cast<std::size_t>(n) + 1);
    Real wn(1);
    for (int i = 0; i < n; ++i) wn *= w;
    r.p = poly::scale(gw, 2 * lambda / (wn * w));
    r.p[0] += 1 / wn;
    r.Q0 = abs(r.Q[0]);
    return r;
}

namespace detail {

template <class Real>
struct QuadraticBall
{
    // condition: rho <= a (c0 - a kappa), i.e. kappa a^2 - c0 a + rho <= 0
    Real c0, kappa, rho;

    std::optional<Real> minimal_a() const
    {
        using std::sqrt;
        const Real disc = c0 * c0 - 4 * kappa * rho;
        if (!(c0 > 0) || disc < 0) return std::nullopt;
        Real a = 2 * rho / (c0 + sqrt(disc));
        a *= Real(1) + Real(1e-12);
        return a;
    }
};

template <class Real>
std::string describe(const char* what, const Real& lhs, const char* op, const Real& rhs)
{
    std::ostringstream os;
    os << what << ": " << to_double(lhs) << ' ' << op << ' ' << to_double(rhs);
    return os.str();
}

template <class Real>
struct GNorms
{
    Real eps, norm_p, norm_Q, kappa;
};

template <class Real>
GNorms<Real> g_norms(const GResidual<Real>& res, const Real& w, const Real& lambda, int n, const Real& eps, int pieces)
{
    using std::pow;
    GNorms<Real> g;
    g.eps = eps;
    g.norm_p = poly::sup_abs(res.p, Real(0), eps, pieces);
    g.norm_Q = poly::sup_abs(res.Q, Real(0), eps, pieces);
    g.kappa = lambda / pow(w, 2 * (n + 1)) * pow(eps, n + 1) * res.Q0;
    return g;
}

template <class Real>
Envelope<Real> g_envelope(const GNorms<Real>& nm, const Real& Q0, const Real& a, int n)
{
    const Real margin = 1 - nm.norm_p - a * nm.kappa;
    if (!(margin > 0)) throw certification_error(describe("c_eps > 0 fails", margin, "<=", Real(0)));
    const Real rhs = a * margin * Q0;
    if (nm.norm_Q > rhs) throw certification_error(describe("||Q||_eps <= a c_eps |Q(0)| fails", nm.norm_Q, ">", rhs));
    const Real contraction = nm.norm_p + 2 * a * nm.kappa;
    if (!(contraction < 1)) throw certification_error(describe("contraction < 1 fails", contraction, ">=", Real(1)));
    Envelope<Real> env;
    env.C = a * Q0;
    env.k = n + 1;
    env.x0 = nm.eps;
    env.certificate = Certificate<Real>{a, nm.eps, Q0, margin, nm.norm_Q, rhs, contraction};
    return env;
}

}  // namespace detail

/// Checks the sufficient conditions on [0, eps] with ball factor `a` and
/// installs the envelope |g - g_n| <= a |Q(0)| x^{n+1}.
template <class Real>
BoundedSeries<Real> certify_g(BoundedSeries<Real> g, const Real& w, const Real& lambda, const Real& a,
                              const Real& eps, int pieces = 2000)
{
    if (!(a > 0) || !(eps > 0)) throw invalid_argument_error("certify_g needs a > 0 and eps > 0");
    const auto res = g_residual(g, w, lambda);
    const auto nm = detail::g_norms(res, w, lambda, g.order, eps, pieces);
    g.envelope = detail::g_envelope(nm, res.Q0, a, g.order);
    return g;
}

/// Smallest admissible ball factor for g on [0, eps], if any.
template <class Real>
std::optional<Real> minimal_a_g(const BoundedSeries<Real>& g, const Real& w, const Real& lambda, const Real& eps,
                                int pieces = 2000)
{
    const auto res = g_residual(g, w, lambda);
    const auto nm = detail::g_norms(res, w, lambda, g.order, eps, pieces);
    return detail::QuadraticBall<Real>{1 - nm.norm_p, nm.kappa, nm.norm_Q / res.Q0}.minimal_a();
}

namespace detail {

/// Tries a in {1.1, 2, 5, a_min} on a descending list of eps and keeps the
/// smallest constant whose interval covers `target`; if none covers it,
/// continues below `target` and returns the first success.
template <class Real, class NormsFn, class BallFn, class EnvelopeFn>
Envelope<Real> search_envelope(const Real& target, const Real& eps_cap, NormsFn norms_at, BallFn ball_of,
                               EnvelopeFn envelope_of)
{
    using std::min;
    auto best_at = [&](const Real& eps) -> std::optional<Envelope<Real>> {
        const auto nm = norms_at(eps);
        std::vector<Real> grid{Real(1.1), Real(2), Real(5)};
        if (auto amin = ball_of(nm).minimal_a()) grid.push_back(*amin);
        std::optional<Envelope<Real>> best;
        for (const auto& a : grid) {
            try {
                auto env = envelope_of(nm, a);
                if (!best || env.C < best->C) best = env;
            } catch (const certification_error&) {
            }
        }
        return best;
    };

    std::vector<Real> eps_list;
    for (Real e = min(Real(2) * target, eps_cap); e > target; e *= Real(0.9)) eps_list.push_back(e);
    if (target <= eps_cap) eps_list.push_back(target);
    std::optional<Envelope<Real>> best;
    for (const auto& e : eps_list) {
        auto env = best_at(e);
        if (env && (!best || env->C < best->C)) best = env;
    }
    if (best) return *best;
    Real e = min(target, eps_cap) * Real(0.9);
    for (int i = 0; i < 80; ++i, e *= Real(0.9))
        if (auto env = best_at(e)) return *env;
    throw certification_error("no (a, eps) pair satisfies the certification conditions; raise the series order");
}

}  // namespace detail

/// Certified envelope for g valid on [0, target] when possible.
template <class Real>
BoundedSeries<Real> certify_g_search(BoundedSeries<Real> g, const Real& w, const Real& lambda, const Real& target,
                                     int pieces = 2000)
{
    const auto res = g_residual(g, w, lambda);
    const int n = g.order;
    g.envelope = detail::search_envelope<Real>(
        target, Real(1e6),
        [&](const Real& eps) { return detail::g_norms(res, w, lambda, n, eps, pieces); },
        [&](const detail::GNorms<Real>& nm) {
            return detail::QuadraticBall<Real>{1 - nm.norm_p, nm.kappa, nm.norm_Q / res.Q0};
        },
        [&](const detail::GNorms<Real>& nm, const Real& a) { return detail::g_envelope(nm, res.Q0, a, n); });
    return g;
}

/// Enclosure of g(x), x >= 0, by pushing the certified bracket at x / w^m
/// forward through the increasing map A_quad.
template <class Real>
BoundedValue<Real> g_forward(const BoundedSeries<Real>& g, const Real& w, const Real& lambda, const Real& x, int m)
{
    if (x < 0) throw domain_error("g_forward expects x >= 0");
    Real y = x;
    for (int i = 0; i < m; ++i) y /= w;
    Real lo = g.eval(y);
    Real hi = lo + g.remainder_bound(y);
    for (int i = 0; i < m; ++i) {
        lo = A_quad(w, lambda, lo);
        hi = A_quad(w, lambda, hi);
    }
    const Real value = (lo + hi) / 2;
    return {value, (hi - lo) / 2 + rounding_allowance<Real>(4.0 * m + 2.0 * g.order, value), true};
}

// ---------------------------------------------------------------------------
// inverse of g

/// Compositional inverse of a series with c_0 = 0, c_1 = 1, truncated at n.
template <class Real>
std::vector<Real> reverse_series(const std::vector<Real>& c, int n)
{
    if (c.size() < 2 || c[0] != 0 || c[1] != 1) throw invalid_argument_error("series reversion needs c0 = 0, c1 = 1");
    const std::size_t N = static_cast<std::size_t>(n);
    std::vector<Real> g(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(std::min(c.size(), N + 1)));
    g.resize(N + 1, Real(0));
    std::vector<std::vector<Real>> pw(N + 1);
    pw[1] = g;
    for (std::size_t k = 2; k <= N; ++k) {
        pw[k] = poly::mul(pw[k - 1], g, N);
        pw[k].resize(N + 1, Real(0));
    }
    std::vector<Real> h(N + 1, Real(0));
    h[1] = 1;
    for (std::size_t m = 2; m <= N; ++m) {
        Real acc(0);
        for (std::size_t k = 1; k < m; ++k) acc += h[k] * pw[k][m];
        h[m] = -acc;
    }
    return h;
}

/// Truncated inverse h_n of g with envelope on [0, y0].
///
/// For y = g(x) with x in [0, X], X = g_n^{-1}(y0):
///   |h_n(y) - x| <= x^{n+1} (|S(x)| + M sup|h_n'|),  S = (h_n(g_n(x)) - x)/x^{n+1},
/// and x <= g_n(x) <= y, where M is the envelope constant of g.
template <class Real>
BoundedSeries<Real> invert_g(const BoundedSeries<Real>& g, int n, const Real& y0, int pieces = 2000)
{
    using std::max;
    using std::min;
    using std::pow;
    const auto& genv = g.require_envelope();
    if (n > g.order) throw invalid_argument_error("inverse order exceeds the order of the g series");
    BoundedSeries<Real> gn = g;
    gn.coeffs.resize(static_cast<std::size_t>(n) + 1);
    gn.order = n;

    BoundedSeries<Real> inv;
    inv.kind = SeriesKind::taylor;
    inv.order = n;
    inv.coeffs = reverse_series(gn.coeffs, n);
    if (!(y0 > 0)) return inv;

    // X with g_n(X) = y0
    if (gn.eval(genv.x0) < y0)
        throw certification_error("g envelope interval is too short for the requested inverse interval");
    Real lo(0), hi = genv.x0;
    for (int i = 0; i < 300; ++i) {
        Real mid = (lo + hi) / 2;
        if (gn.eval(mid) < y0)
            lo = mid;
        else
            hi = mid;
    }
    const Real X = hi;

    auto S = poly::compose(inv.coeffs, gn.coeffs);
    S[1] -= 1;
    S = poly::shift_down(S, static_cast<std::size_t>(n) + 1);
    const Real hd = poly::sup_abs(poly::derivative(inv.coeffs), Real(0), y0, pieces);
    const Real M = genv.C;

    Real C(0);
    const Real step = X / pieces;
    for (int i = 0; i < pieces; ++i) {
        const Real xl = step * i;
        const Real xr = (i + 1 == pieces) ? X : step * (i + 1);
        auto [slo, shi] = poly::enclosure(S, xl, xr);
        using std::abs;
        const Real bound = max(abs(slo), abs(shi)) + M * hd;
        Real factor(1);
        if (xl > 0) factor = min(Real(1), pow(xr / gn.eval(xl), n + 1));
        C = max(C, factor * bound);
    }
    Envelope<Real> env;
    env.C = C * (1 + Real(1e-12));
    env.k = n + 1;
    env.x0 = y0;
    inv.envelope = env;
    return inv;
}

/// Number of A_inv pullbacks needed to bring y into [0, x0], at least `min_back`.
template <class Real>
int g_inverse_depth(const Real& w, const Real& lambda, const Real& y, const Real& x0, int min_back, int cap = 400)
{
    Real t = y;
    int n = 0;
    for (; n < min_back; ++n) t = A_inv(w, lambda, t);
    for (; t > x0; ++n) {
        if (n >= cap) throw domain_error("argument too large for backward refinement of g^{-1}");
        t = A_inv(w, lambda, t);
    }
    return n;
}

/// g^{-1}(y) = w^n h_n((A_inv)^n (y)), error C y^k / w^{(k-1) n}.
template <class Real>
BoundedValue<Real> refine_g_inverse(const BoundedSeries<Real>& approx, const Real& w, const Real& lambda,
                                    const Real& y, int n_back)
{
    using std::pow;
    const auto& env = approx.require_envelope();
    if (y < 0) throw domain_error("g^{-1} refinement expects y >= 0");
    if (n_back < 0) throw invalid_argument_error("n_back must be non-negative");
    if (y == 0) return {Real(0), Real(0), true};
    Real t = y;
    for (int i = 0; i < n_back; ++i) t = A_inv(w, lambda, t);
    if (t > env.x0) throw domain_error("pulled-back argument " + full_string(t) + " leaves the certified interval");
    const Real wn = pow(w, n_back);
    const Real value = wn * approx.eval(t);
    const Real bound = env.C * pow(y, env.k) / pow(w, (env.k - 1) * n_back);
    return {value, bound * Real(1.01) + rounding_allowance<Real>(6.0 * n_back + 2.0 * approx.order, value + y), true};
}

// ---------------------------------------------------------------------------
// phi

/// phi(x) = sum_{m=0}^{2n} b_m x^{m-1}, b_0 = 1/lambda, b_1 = -1/2, from
/// u = x phi: u(x^2) = lambda u(x)^2 + lambda x u(x).
template <class Real>
BoundedSeries<Real> expand_phi(const Real& lambda, int n)
{
    if (n < 1) throw invalid_argument_error("phi order must be at least 1");
    if (!(lambda > 0) || !(lambda < 1)) throw invalid_map_error("phi expansion requires 0 < lambda < 1");
    const std::size_t M = 2 * static_cast<std::size_t>(n);
    BoundedSeries<Real> s;
    s.kind = SeriesKind::laurent;
    s.order = n;
    s.coeffs.assign(M + 1, Real(0));
    s.coeffs[0] = 1 / lambda;
    for (std::size_t m = 1; m <= M; ++m) {
        Real t = (m % 2 == 0) ? s.coeffs[m / 2] : Real(0);
        Real acc(0);
        for (std::size_t i = 1; i < m; ++i) acc += s.coeffs[i] * s.coeffs[m - i];
        t -= lambda * acc + lambda * s.coeffs[m - 1];
        s.coeffs[m] = t / 2;
    }
    return s;
}

template <class Real>
BoundedSeries<Real> expand_phi(const PinningMap<Real>& map, int n)
{
    map.require_quadratic();
    return expand_phi(map.lambda(), n);
}

/// Writing phi = phi_n + x^{2n+1} r, r solves
///   r = -p0/p1 + x^{2n+2} (lambda r^2 - r(x^2)) / p1.
template <class Real>
struct PhiResidual
{
    poly::Poly<Real> p0;
    poly::Poly<Real> p1;
    Real r0{};  // |p0(0)| / 2
};

template <class Real>
PhiResidual<Real> phi_residual(const BoundedSeries<Real>& phi, const Real& lambda)
{
    using std::abs;
    const std::size_t n = static_cast<std::size_t>(phi.order);
    const auto& u = phi.coeffs;
    auto uu = poly::scale(poly::mul(u, u), lambda);
    poly::Poly<Real> xu(u.size() + 1, Real(0));
    for (std::size_t i = 0; i < u.size(); ++i) xu[i + 1] = lambda * u[i];
    poly::Poly<Real> u2(2 * u.size() - 1, Real(0));
    for (std::size_t i = 0; i < u.size(); ++i) u2[2 * i] = -u[i];
    auto D = poly::add(poly::add(uu, xu), u2);
    PhiResidual<Real> r;
    r.p0 = poly::scale(poly::shift_down(D, 2 * n + 2), Real(-1));
    r.p1.assign(2 * n + 1, Real(0));
    r.p1[0] = -2;
    for (std::size_t m = 2; m <= 2 * n; ++m) r.p1[m] = -2 * lambda * u[m];
    r.r0 = abs(r.p0[0]) / 2;
    return r;
}

namespace detail {

template <class Real>
struct PhiNorms
{
    Real eps, inv_p1, ratio, K;
};

template <class Real>
PhiNorms<Real> phi_norms(const PhiResidual<Real>& res, int n, const Real& eps, int pieces)
{
    using std::pow;
    PhiNorms<Real> nm;
    nm.eps = eps;
    const Real m = poly::inf_abs(res.p1, Real(0), eps, pieces);
    if (!(m > 0)) throw certification_error("p1 cannot be separated from zero on [0, eps]");
    nm.inv_p1 = 1 / m;
    nm.ratio = poly::sup_abs_ratio(res.p0, res.p1, Real(0), eps, pieces);
    nm.K = nm.inv_p1 * pow(eps, 2 * n + 2);
    return nm;
}

template <class Real>
Envelope<Real> phi_envelope(const PhiNorms<Real>& nm, const Real& r0, const Real& lambda, const Real& a, int n)
{
    if (nm.eps > 1) throw certification_error("phi certification needs eps <= 1");
    if (nm.ratio < 0) throw certification_error("p1 cannot be separated from zero on [0, eps]");
    const Real margin = 1 - nm.K * (a * lambda * r0 + 1);
    if (!(margin > 0)) throw certification_error(describe("C_eps > 0 fails", margin, "<=", Real(0)));
    const Real rhs = a * margin * r0;
    if (nm.ratio > rhs) throw certification_error(describe("||p0/p1||_eps <= a C_eps r0 fails", nm.ratio, ">", rhs));
    const Real contraction = nm.K * (2 * a * lambda * r0 + 1);
    if (!(contraction < 1)) throw certification_error(describe("contraction < 1 fails", contraction, ">=", Real(1)));
    Envelope<Real> env;
    env.C = a * r0;
    env.k = 2 * n + 1;
    env.x0 = nm.eps;
    env.certificate = Certificate<Real>{a, nm.eps, r0, margin, nm.ratio, rhs, contraction};
    return env;
}

}  // namespace detail

template <class Real>
BoundedSeries<Real> certify_phi(BoundedSeries<Real> phi, const Real& lambda, const Real& a, const Real& eps,
                                int pieces = 2000)
{
    if (!(a > 0) || !(eps > 0)) throw invalid_argument_error("certify_phi needs a > 0 and eps > 0");
    const auto res = phi_residual(phi, lambda);
    const auto nm = detail::phi_norms(res, phi.order, eps, pieces);
    phi.envelope = detail::phi_envelope(nm, res.r0, lambda, a, phi.order);
    return phi;
}

template <class Real>
std::optional<Real> minimal_a_phi(const BoundedSeries<Real>& phi, const Real& lambda, const Real& eps,
                                  int pieces = 2000)
{
    const auto res = phi_residual(phi, lambda);
    const auto nm = detail::phi_norms(res, phi.order, eps, pieces);
    if (nm.ratio < 0) return std::nullopt;
    return detail::QuadraticBall<Real>{1 - nm.K, nm.K * lambda * res.r0, nm.ratio / res.r0}.minimal_a();
}

template <class Real>
BoundedSeries<Real> certify_phi_search(BoundedSeries<Real> phi, const Real& lambda, const Real& target,
                                       int pieces = 2000)
{
    const auto res = phi_residual(phi, lambda);
    const int n = phi.order;
    phi.envelope = detail::search_envelope<Real>(
        target, Real(1),
        [&](const Real& eps) {
            try {
                return detail::phi_norms(res, n, eps, pieces);
            } catch (const certification_error&) {
                return detail::PhiNorms<Real>{eps, Real(0), Real(-1), Real(0)};
            }
        },
        [&](const detail::PhiNorms<Real>& nm) {
            const Real rho = nm.ratio < 0 ? Real(1e300) : Real(nm.ratio / res.r0);
            return detail::QuadraticBall<Real>{1 - nm.K, nm.K * lambda * res.r0, rho};
        },
        [&](const detail::PhiNorms<Real>& nm, const Real& a) { return detail::phi_envelope(nm, res.r0, lambda, a, n); });
    return phi;
}

/// Smallest n >= min_back with y^{2^n} <= x0.
template <class Real>
int phi_depth(const Real& y, const Real& x0, int min_back, int cap = 200)
{
    if (!(y > 0) || !(y < 1)) throw domain_error("phi refinement expects 0 < y < 1");
    Real x = y;
    int n = 0;
    for (; n < min_back; ++n) x *= x;
    for (; x > x0; ++n) {
        if (n >= cap) throw domain_error("argument too close to 1 for backward refinement of phi");
        x *= x;
    }
    return n;
}

/// phi(y) = Q_sqrt^n(phi_n(y^{2^n})), error C y^{2^n k} / lambda^n.
template <class Real>
BoundedValue<Real> refine_phi(const BoundedSeries<Real>& approx, const Real& lambda, const Real& y, int n_back)
{
    using std::pow;
    const auto& env = approx.require_envelope();
    if (!(y > 0)) throw domain_error("phi refinement expects y > 0");
    if (n_back < 0) throw invalid_argument_error("n_back must be non-negative");
    Real x = y;
    for (int i = 0; i < n_back; ++i) x *= x;
    if (x > env.x0) throw domain_error("y^(2^n) = " + full_string(x) + " leaves the certified interval");
    Real v = approx.eval(x);
    const Real r = env.C * pow(x, env.k);
    if (v - r < 0) throw domain_error("phi approximation is negative on the pullback orbit");
    for (int i = 0; i < n_back; ++i) v = Q_sqrt(lambda, v);
    const Real bound = r / pow(lambda, n_back);
    // Q_sqrt does not increase relative errors
    return {v, bound * Real(1.01) + rounding_allowance<Real>(6.0 * n_back + 4.0 * approx.order, v), true};
}

}  // namespace oscamp
