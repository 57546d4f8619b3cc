// Julia-set boundary points of the quadratic map: the Boettcher
// parametrization A(e^{i pi t}) and the preimage tree of the fixed point 1.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "oscamp/errors.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/oscillation.hpp"
#include "oscamp/series.hpp"

namespace oscamp {

using cplx = std::complex<double>;

enum class JuliaMethod { boettcher, inverse_iteration };

struct JuliaCloud
{
    JuliaMethod method = JuliaMethod::boettcher;
    std::vector<cplx> points;
    std::vector<double> t;  // parameters (boettcher) or empty
    int depth = 0;          // preimage levels (inverse iteration) or refinement count
    std::vector<double> weights;
};

struct JuliaOptions
{
    int series_terms = 250;
    int refinements = 3;     // exact inverse-branch pullbacks
    int fourier_order = 24;  // harmonics requested; noise-level ones are dropped
    int samples = 256;
    double noise_factor = 64;
};

/// Both preimages of z: (-p1 +- sqrt(p1^2 - 4 p2 (p0 - z))) / (2 p2).
template <class Real>
std::pair<cplx, cplx> preimages(const PinningMap<Real>& map, const cplx& z)
{
    map.require_quadratic();
    const double p0 = static_cast<double>(map.p(0)), p1 = static_cast<double>(map.p(1)),
                 p2 = static_cast<double>(map.p(2));
    const cplx root = std::sqrt(cplx(p1 * p1) - 4.0 * p2 * (cplx(p0) - z));
    return {(-p1 + root) / (2 * p2), (-p1 - root) / (2 * p2)};
}

/// All 2^depth solutions of f_depth(z) = 1.
template <class Real>
JuliaCloud julia_inverse_iteration(const PinningMap<Real>& map, int depth)
{
    if (depth < 1) throw invalid_argument_error("inverse iteration depth must be at least 1");
    if (depth > 24) throw invalid_argument_error("inverse iteration depth above 24 is not supported");
    JuliaCloud cloud;
    cloud.method = JuliaMethod::inverse_iteration;
    cloud.depth = depth;
    for (const auto& p : map.weights()) cloud.weights.push_back(static_cast<double>(p));
    std::vector<cplx> level{cplx(1.0, 0.0)};
    for (int k = 0; k < depth; ++k) {
        std::vector<cplx> next;
        next.reserve(level.size() * 2);
        for (const auto& z : level) {
            auto [a, b] = preimages(map, z);
            next.push_back(a);
            next.push_back(b);
        }
        level.swap(next);
    }
    cloud.points = std::move(level);
    return cloud;
}

/// One-sided Hausdorff distance max_{a} min_{b} |a - b|.
inline double cloud_distance(const JuliaCloud& a, const JuliaCloud& b)
{
    if (a.points.empty() || b.points.empty()) throw invalid_argument_error("cloud_distance needs non-empty clouds");
    double worst = 0;
    for (const auto& p : a.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b.points) best = std::min(best, std::abs(p - q));
        worst = std::max(worst, best);
    }
    return worst;
}

/// Evaluator of A(e^{i pi t}) built from an oscillation engine.
///
/// The base value continues omega to the complex argument log(i pi t) through
/// its Fourier series and applies g = 1 + (lambda/p2) g_frak. The base value is
/// accurate near t = 0; it is refined by evaluating it at 2^R t and pulling
/// back R times through the inverse branch of f closest to the base value at
/// each intermediate parameter. Results are not certified.
template <class Real>
class BoettcherParametrization
{
public:
    BoettcherParametrization(const OscillationEngine<Real>& engine, JuliaOptions options = {})
        : engine_(&engine), options_(options)
    {
        const auto& map = engine.map();
        map.require_quadratic();
        w_ = static_cast<double>(map.w());
        lambda_ = static_cast<double>(map.lambda());
        gamma_ = static_cast<double>(engine.gamma());
        scale_ = static_cast<double>(map.lambda() / map.p(2));
        other_preimage_ = static_cast<double>((map.p(0) - 1) / map.p(2));
        for (const auto& c : expand_g(map.w(), map.lambda(), options.series_terms).coeffs)
            g_d_.push_back(static_cast<double>(c));

        const int m = std::max(options.samples, 4 * options.fourier_order);
        const auto summary = engine.omega_mean_and_fourier(m, options.fourier_order);
        period_ = static_cast<double>(engine.log2());
        mean_ = static_cast<double>(summary.mean.value);
        for (const auto& h : summary.harmonics) {
            if (h.amplitude.value <= Real(options.noise_factor) * (h.amplitude.err + engine.max_pointwise_error()))
                break;
            coeffs_.push_back(cplx(static_cast<double>(h.c.re.value), static_cast<double>(h.c.im.value)));
        }
    }

    int harmonics_used() const { return static_cast<int>(coeffs_.size()); }

    /// Fourier continuation of omega: c0 + sum c_n e^{2 pi i n z / T} + conj(c_n) e^{-2 pi i n z / T}.
    cplx omega(const cplx& z) const
    {
        const double two_pi = 2 * std::acos(-1.0);
        cplx acc(mean_, 0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            const double n = static_cast<double>(k + 1);
            const cplx e = std::exp(cplx(0, two_pi * n / period_) * z);
            acc += coeffs_[k] * e + std::conj(coeffs_[k]) / e;
        }
        return acc;
    }

    /// g_frak(x) = A_quad^3(g_N(x / w^3)) at complex x.
    cplx g_frak(const cplx& x) const
    {
        const int back = 3;
        cplx y = x;
        for (int i = 0; i < back; ++i) y /= w_;
        cplx v(0);
        for (std::size_t i = g_d_.size(); i-- > 0;) v = v * y + g_d_[i];
        for (int i = 0; i < back; ++i) v = w_ * v + lambda_ * v * v;
        return v;
    }

    /// Unrefined A(e^{i pi t}), t in (-1, 1].
    cplx base(double t) const
    {
        if (t == 0) return {1.0, 0.0};
        const double pi = std::acos(-1.0);
        const cplx logz(0, pi * t);
        const cplx arg = std::pow(logz, 1.0 / gamma_) * omega(std::log(logz));
        return 1.0 + scale_ * g_frak(arg);
    }

    /// base(t), except at t = 0 and t = 1 where A is the fixed point 1 and its other preimage.
    cplx anchor(double t) const
    {
        if (t == 0) return {1.0, 0.0};
        if (t == 1) return {other_preimage_, 0.0};
        return base(t);
    }

    /// Reduces t into (-1, 1].
    static double reduce(double t)
    {
        double r = std::fmod(t, 2.0);
        if (r <= -1) r += 2;
        if (r > 1) r -= 2;
        return r;
    }

    cplx operator()(double t) const
    {
        t = reduce(t);
        if (t == 0) return {1.0, 0.0};
        const int R = options_.refinements;
        std::vector<double> ts(static_cast<std::size_t>(R) + 1);
        ts[0] = t;
        for (int j = 1; j <= R; ++j) ts[static_cast<std::size_t>(j)] = reduce(2 * ts[static_cast<std::size_t>(j) - 1]);
        cplx u = anchor(ts[static_cast<std::size_t>(R)]);
        for (int j = R - 1; j >= 0; --j) {
            const cplx target = anchor(ts[static_cast<std::size_t>(j)]);
            auto [a, b] = preimages(engine_->map(), u);
            u = std::abs(a - target) <= std::abs(b - target) ? a : b;
        }
        return u;
    }

private:
    const OscillationEngine<Real>* engine_;
    JuliaOptions options_;
    double w_ = 0, lambda_ = 0, gamma_ = 0, scale_ = 0, period_ = 0, mean_ = 0, other_preimage_ = 0;
    std::vector<double> g_d_;
    std::vector<cplx> coeffs_;
};

template <class Real>
JuliaCloud julia_boettcher(const OscillationEngine<Real>& engine, const std::vector<double>& t_grid,
                           const JuliaOptions& options = {})
{
    BoettcherParametrization<Real> A(engine, options);
    JuliaCloud cloud;
    cloud.method = JuliaMethod::boettcher;
    cloud.depth = options.refinements;
    for (const auto& p : engine.map().weights()) cloud.weights.push_back(static_cast<double>(p));
    for (double t : t_grid) {
        if (!(t > -1 && t <= 1)) throw domain_error("Boettcher parameter t must lie in (-1, 1]");
        cloud.t.push_back(t);
        cloud.points.push_back(A(t));
    }
    return cloud;
}

/// Uniform grid of m parameters t_j = -1 + 2 (j + 1) / m in (-1, 1].
inline std::vector<double> julia_grid(int m)
{
    if (m < 1) throw invalid_argument_error("grid size must be positive");
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) t[static_cast<std::size_t>(j)] = -1.0 + 2.0 * (j + 1) / m;
    return t;
}

}  // namespace oscamp
