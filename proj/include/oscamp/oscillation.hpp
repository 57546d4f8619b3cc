// The log 2-periodic function omega, the bijection beta(X) = X^{1/gamma} omega(log X),
// alpha, and the critical amplitude Omega(x) = beta^{-1}(c e^x) e^{-gamma x}.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/periodic.hpp"
#include "oscamp/real.hpp"
#include "oscamp/series.hpp"

namespace oscamp {

struct EngineOptions
{
    int g_order = 20;
    int phi_order = 10;
    int depth_phi = 12;  // n1
    int depth_g = 12;    // n2
    double g_inverse_radius = 1.0;
    double phi_radius = 0.9;
    int samples = 256;
    int harmonics = 4;
    double target_error = 5e-13;
    int pieces = 2000;
    int threads = 1;
};

template <class Real>
struct BetaInverse
{
    Real X{};
    Real err{};
    Real slope_min{};  // lower bound of beta' near X
    int iterations = 0;
};

template <class Real>
struct AmplitudeSummary
{
    FourierSummary<Real> fourier;
    BoundedValue<Real> oscillation;  // max - min over one period
};

template <class Real>
class OscillationEngine
{
public:
    using OmegaFn = std::function<BoundedValue<Real>(const Real&)>;

    explicit OscillationEngine(PinningMap<Real> map, EngineOptions options = {})
        : map_(std::move(map)), options_(options)
    {
        setup_constants();
        build_series();
        if (options_.samples > 0) {
            summary_ = omega_mean_and_fourier(options_.samples, options_.harmonics);
            if (summary_->max_pointwise_err > Real(options_.target_error))
                throw certification_error("omega pointwise error " + full_string(summary_->max_pointwise_err) +
                                          " exceeds the target; raise series orders or depths");
        }
    }

    /// Engine whose omega is supplied by the caller (x = log s -> omega(x)).
    static OscillationEngine with_omega(PinningMap<Real> map, OmegaFn omega, EngineOptions options = {})
    {
        return OscillationEngine(std::move(map), std::move(omega), options);
    }

    const PinningMap<Real>& map() const { return map_; }
    const EngineOptions& options() const { return options_; }
    const Real& gamma() const { return gamma_; }
    const Real& w() const { return map_.w(); }
    const Real& lambda() const { return map_.lambda(); }
    const Real& c_frak() const { return c_frak_; }
    const Real& log2() const { return log2_; }
    Real window_start() const { return Real(-2) - log2_; }
    Real window_end() const { return Real(-2); }
    Real amplitude_period() const
    {
        using std::log;
        return log(map_.w());
    }

    const BoundedSeries<Real>& g_series() const { return require(g_, "g"); }
    const BoundedSeries<Real>& g_inverse_series() const { return require(ginv_, "g^{-1}"); }
    const BoundedSeries<Real>& phi_series() const { return require(phi_, "phi"); }

    const FourierSummary<Real>& omega_summary() const
    {
        if (!summary_) throw invalid_argument_error("engine was built without an omega summary");
        return *summary_;
    }

    /// Largest certified pointwise error of omega over the default sample.
    Real max_pointwise_error() const { return omega_summary().max_pointwise_err; }

    BoundedValue<Real> g_inverse(const Real& y) const
    {
        const auto& s = g_inverse_series();
        const int n = g_inverse_depth(map_.w(), map_.lambda(), y, s.require_envelope().x0, options_.depth_g);
        return refine_g_inverse(s, map_.w(), map_.lambda(), y, n);
    }

    BoundedValue<Real> phi(const Real& y) const
    {
        const auto& s = phi_series();
        const int n = phi_depth(y, s.require_envelope().x0, options_.depth_phi);
        return refine_phi(s, map_.lambda(), y, n);
    }

    /// omega(log s) = s^{-1/gamma} g^{-1}(phi(e^{-s}) - (1-lambda)/lambda), s in the window.
    BoundedValue<Real> omega_at(const Real& s) const
    {
        using std::exp;
        using std::log;
        using std::pow;
        if (!(s > 0)) throw domain_error("omega_at expects s > 0");
        const Real x = log(s);
        const Real slack = Real(1e-20);
        if (x < window_start() - slack || x > window_end() + slack)
            throw domain_error("log s = " + full_string(x) + " is outside the certified window; use omega()");
        if (custom_) return custom_(x);
        const Real& lam = map_.lambda();
        const auto P = phi(exp(-s));
        const Real arg = P.value - (1 - lam) / lam;
        if (arg < 0) throw domain_error("phi(e^{-s}) fell below the fixed point (1-lambda)/lambda");
        const auto G = g_inverse(arg);
        const Real factor = pow(s, -1 / gamma_);
        const Real value = factor * G.value;
        const Real err = factor * (G.err + P.err) * Real(1 + 1e-10) + rounding_allowance<Real>(8, value);
        return {value, err, G.certified && P.certified};
    }

    /// omega at any real x, reduced into the window by multiples of log 2.
    BoundedValue<Real> omega(const Real& x) const
    {
        using std::abs;
        using std::exp;
        using std::floor;
        const Real a = window_start();
        const Real k = floor((x - a) / log2_);
        Real xr = x - k * log2_;
        if (xr >= window_end()) xr -= log2_;
        if (custom_) return custom_(x);
        auto v = omega_at(exp(xr));
        v.err += omega_slope_bound() * rounding_allowance<Real>(4, abs(x) + abs(k) * log2_);
        return v;
    }

    FourierSummary<Real> omega_mean_and_fourier(int m, int n_max) const
    {
        if (m < 4 * n_max) throw invalid_argument_error("need m >= 4 n_max samples");
        auto s = sample([this](const Real& x) { return omega(x); }, window_start(), log2_, m, options_.threads);
        return fourier_summary(s, n_max);
    }

    /// Upper bound of |omega'| from the Fourier summary, padded generously.
    Real omega_slope_bound() const
    {
        using std::max;
        if (!summary_) return Real(1);
        Real acc(0);
        const Real two_pi = 2 * pi_constant<Real>();
        for (const auto& h : summary_->harmonics) acc += (h.amplitude.value + h.amplitude.err) * two_pi * h.n / log2_;
        return max(Real(1e-3), 10 * acc);
    }

    Real omega_lower_bound() const
    {
        const auto& s = omega_summary();
        Real spread(0);
        for (const auto& h : s.harmonics) spread += h.amplitude.value + h.amplitude.err;
        return s.mean.value - s.mean.err - 2 * spread - 2 * s.max_pointwise_err - Real(1e-6) * s.mean.value;
    }

    Real omega_upper_bound() const
    {
        const auto& s = omega_summary();
        Real spread(0);
        for (const auto& h : s.harmonics) spread += h.amplitude.value + h.amplitude.err;
        return s.mean.value + s.mean.err + 2 * spread + 2 * s.max_pointwise_err + Real(1e-6) * s.mean.value;
    }

    /// beta(X) = X^{1/gamma} omega(log X)
    BoundedValue<Real> beta(const Real& X) const
    {
        using std::log;
        using std::pow;
        if (!(X > 0)) throw domain_error("beta expects X > 0");
        const auto om = omega(log(X));
        const Real f = pow(X, 1 / gamma_);
        return {f * om.value, f * om.err + rounding_allowance<Real>(6, f * om.value), om.certified};
    }

    /// Solves beta(X) = y by safeguarded Newton from X = (y / mean omega)^gamma.
    BetaInverse<Real> invert_beta(const Real& y, const Real& tol = Real(0)) const
    {
        using std::abs;
        using std::cos;
        using std::log;
        using std::pow;
        if (!(y > 0)) throw domain_error("beta^{-1} expects y > 0");
        const auto& s = omega_summary();
        const Real ig = 1 / gamma_;
        const Real stop = tol > 0 ? tol : Real(64) * working_epsilon<Real>();

        Real lo = pow(y / omega_upper_bound(), gamma_);
        Real hi = pow(y / omega_lower_bound(), gamma_);
        for (int i = 0; beta(lo).value > y; ++i) {
            if (i > 60) throw convergence_error("beta^{-1}: cannot bracket from below");
            lo /= 2;
        }
        for (int i = 0; beta(hi).value < y; ++i) {
            if (i > 60) throw convergence_error("beta^{-1}: cannot bracket from above");
            hi *= 2;
        }

        const Real two_pi = 2 * pi_constant<Real>();
        auto slope = [&](const Real& X) {
            // beta'(X) = X^{1/gamma - 1} (omega/gamma + omega')
            const Real lx = log(X);
            Real dom(0);
            for (const auto& h : s.harmonics)
                dom += h.amplitude.value * (two_pi * h.n / log2_) * cos(two_pi * h.n * (lx - h.phase) / log2_);
            return pow(X, ig - 1) * (s.reconstruct(lx) * ig + dom);
        };

        BetaInverse<Real> out;
        Real X = pow(y / s.mean.value, gamma_);
        if (X <= lo || X >= hi) X = (lo + hi) / 2;
        for (int it = 1;; ++it) {
            if (it > 200) throw convergence_error("beta^{-1}: Newton iteration did not converge");
            const Real F = beta(X).value - y;
            if (F > 0)
                hi = X;
            else
                lo = X;
            const Real dX = F / slope(X);
            Real next = X - dX;
            if (!(next > lo && next < hi)) next = (lo + hi) / 2;
            const Real change = abs(next - X);
            X = next;
            out.iterations = it;
            if (change <= stop * X || hi - lo <= stop * X) break;
        }
        const auto b = beta(X);
        const Real residual = abs(b.value - y);
        const Real slope_min = pow(X * Real(1.001), ig - 1) * (omega_lower_bound() * ig - omega_slope_bound());
        if (!(slope_min > 0)) throw certification_error("beta is not provably increasing near the solution");
        out.X = X;
        out.slope_min = slope_min * Real(0.99);
        out.err = (residual + b.err) / out.slope_min;
        return out;
    }

    BoundedValue<Real> beta_inverse(const Real& y, const Real& tol = Real(0)) const
    {
        const auto r = invert_beta(y, tol);
        return {r.X, r.err, omega_summary().mean.certified};
    }

    /// alpha(t) = beta^{-1}(e^t) e^{-gamma t}
    BoundedValue<Real> alpha_at(const Real& t) const
    {
        using std::exp;
        const auto r = invert_beta(exp(t));
        const Real f = exp(-gamma_ * t);
        return {r.X * f, r.err * f + rounding_allowance<Real>(6, r.X * f), omega_summary().mean.certified};
    }

    /// Omega(x) = c^gamma alpha(x + log c) = beta^{-1}(c e^x) e^{-gamma x}
    BoundedValue<Real> Omega_at(const Real& x) const
    {
        using std::exp;
        const auto r = invert_beta(c_frak_ * exp(x));
        const Real f = exp(-gamma_ * x);
        return {r.X * f, r.err * f + rounding_allowance<Real>(8, r.X * f), omega_summary().mean.certified};
    }

    /// beta^{-1} applied to an input that itself carries an error.
    BoundedValue<Real> beta_inverse_of(const BoundedValue<Real>& y) const
    {
        const auto r = invert_beta(y.value);
        return {r.X, r.err + y.err / r.slope_min, y.certified && omega_summary().mean.certified};
    }

    /// ell(delta) = -log G^{-1}(lambda/(1-lambda) - delta) = beta^{-1}(g^{-1}(v(delta))).
    BoundedValue<Real> ell(const Real& delta) const
    {
        if (!(delta > 0)) throw domain_error("ell expects delta > 0");
        const Real v = v_of_delta(map_.lambda(), delta);
        return beta_inverse_of(g_inverse(v));
    }

    /// F(h) through ell(delta(h)); v(delta(h)) = c (e^h - 1).
    BoundedValue<Real> free_energy_near_critical(const Real& h, const Real& tol = Real(1)) const
    {
        using std::expm1;
        if (h <= 0) return {Real(0), Real(0), true};
        const Real v = c_frak_ * expm1(h);
        auto F = beta_inverse_of(g_inverse(v));
        if (F.err > tol)
            throw precision_error("near-critical free energy error " + full_string(F.err) + " exceeds tolerance");
        return F;
    }

    /// Omega over one period [0, log w): mean, harmonics and max - min.
    AmplitudeSummary<Real> amplitude(int m, int n_max) const
    {
        using std::abs;
        const Real T = amplitude_period();
        auto s = sample([this](const Real& x) { return Omega_at(x); }, Real(0), T, m, options_.threads);
        AmplitudeSummary<Real> out;
        out.fourier = fourier_summary(s, n_max);
        const Real pi = pi_constant<Real>();
        Real curvature(0);
        for (const auto& h : out.fourier.harmonics) {
            const Real t = pi * h.n / m;
            curvature += (h.amplitude.value + h.amplitude.err) * t * t;
        }
        out.oscillation = {out.fourier.sample_max - out.fourier.sample_min, 2 * s.max_err() + curvature,
                           out.fourier.mean.certified};
        return out;
    }

private:
    OscillationEngine(PinningMap<Real> map, OmegaFn omega, EngineOptions options)
        : map_(std::move(map)), options_(options), custom_(std::move(omega))
    {
        setup_constants();
        build_series();
        if (options_.samples > 0) summary_ = omega_mean_and_fourier(options_.samples, options_.harmonics);
    }

    template <class S>
    static const S& require(const std::optional<S>& s, const char* name)
    {
        if (!s) throw invalid_argument_error(std::string("engine has no ") + name + " series");
        return *s;
    }

    void setup_constants()
    {
        using std::log;
        map_.require_quadratic();
        gamma_ = map_.gamma();
        c_frak_ = map_.c_frak();
        log2_ = log(Real(2));
    }

    void build_series()
    {
        const Real& w = map_.w();
        const Real& lam = map_.lambda();
        const Real y0(options_.g_inverse_radius);
        g_ = certify_g_search(expand_g(w, lam, options_.g_order), w, lam, y0, options_.pieces);
        ginv_ = invert_g(*g_, options_.g_order, y0, options_.pieces);
        phi_ = certify_phi_search(expand_phi(lam, options_.phi_order), lam, Real(options_.phi_radius), options_.pieces);
    }

    PinningMap<Real> map_;
    EngineOptions options_;
    OmegaFn custom_;
    Real gamma_{};
    Real c_frak_{};
    Real log2_{};
    std::optional<BoundedSeries<Real>> g_;
    std::optional<BoundedSeries<Real>> ginv_;
    std::optional<BoundedSeries<Real>> phi_;
    std::optional<FourierSummary<Real>> summary_;
};

}  // namespace oscamp
