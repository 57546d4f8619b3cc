#include "support.hpp"

using namespace oscamp;
using namespace oscamp::testing;

namespace {

/// omega(log s) evaluated at s itself, without reduction into the window.
BoundedValue<R> raw_omega(const OscillationEngine<R>& e, const R& s)
{
    const R l = e.lambda();
    const auto P = e.phi(exp(-s));
    const auto G = e.g_inverse(P.value - (1 - l) / l);
    const R f = pow(s, -1 / e.gamma());
    return {f * G.value, f * (G.err + P.err) * R(1.01) + R(1e-55), true};
}

OscillationEngine<R> constant_engine(const PinningMap<R>& f, const R& c)
{
    EngineOptions o;
    o.samples = 64;
    return OscillationEngine<R>::with_omega(f, [c](const R&) { return BoundedValue<R>{c, R(0), true}; }, o);
}

}  // namespace

TEST(Oscillation, PointwiseErrorOnWindow)
{
    const auto& e = fifth_engine();
    EXPECT_LE(e.max_pointwise_error(), R(5e-13));
    EXPECT_LE(quarter_engine().max_pointwise_error(), R(5e-13));
    for (int j = 0; j <= 16; ++j) {
        const R x = e.window_start() + (e.window_end() - e.window_start()) * j / 16;
        const auto v = e.omega_at(exp(x));
        EXPECT_LE(v.err, R(5e-13));
        EXPECT_LE(abs(v.value - num("4.45140273002")), R(1e-7));
    }
}

TEST(Oscillation, OutsideWindowIsRejected)
{
    const auto& e = fifth_engine();
    EXPECT_THROW(e.omega_at(R(1)), domain_error);
    EXPECT_THROW(e.omega_at(R(-1)), domain_error);
    EXPECT_NO_THROW(e.omega(R(5)));
}

TEST(Oscillation, PeriodicityOfOmega)
{
    for (const auto* e : {&fifth_engine(), &quarter_engine()}) {
        const auto a = e->omega_at(exp(e->window_start()));
        const auto b = e->omega_at(exp(e->window_end()));
        EXPECT_TRUE(close(a.value, b.value, a.err + b.err));
        for (int j = 0; j < 10; ++j) {
            const R x = e->window_start() + e->log2() * j / 10;
            const auto in = e->omega(x);
            const auto out = raw_omega(*e, exp(x + e->log2()));
            EXPECT_TRUE(close(in.value, out.value, 2 * std::max(in.err, out.err)));
        }
    }
}

TEST(Oscillation, MeanAndFirstHarmonic)
{
    const auto& f = fifth_engine().omega_summary();
    EXPECT_TRUE(close(f.mean.value, num("4.45140273002"), R(1e-10)));
    EXPECT_TRUE(close(f.harmonics[0].amplitude.value, num("5.938e-8"), R(1e-10)));
    EXPECT_LE(f.mean.err, R(1e-11));
}

TEST(Oscillation, NearSinusoidal)
{
    for (const auto* e : {&fifth_engine(), &quarter_engine()}) {
        const auto& f = e->omega_summary();
        const R g1 = f.harmonics[0].amplitude.value;
        for (int j = 0; j < 20; ++j) {
            const auto v = e->omega(e->window_start() + e->log2() * j / 20);
            EXPECT_GT(v.value, R(0));
            EXPECT_LE(abs(v.value - f.mean.value), 2 * g1 + v.err + f.mean.err);
        }
    }
}

TEST(Oscillation, ConstantOmegaMock)
{
    const auto e = constant_engine(quarter_map(), R(1));
    const auto f = e.omega_mean_and_fourier(64, 4);
    EXPECT_EQ(f.mean.value, R(1));
    for (const auto& h : f.harmonics) EXPECT_LE(h.amplitude.value, h.amplitude.err + R(1e-55));
    for (const char* y : {"0.1", "1", "10"}) {
        const R yv = num(y);
        EXPECT_TRUE(close(e.beta_inverse(yv).value, pow(yv, e.gamma()), R(1e-50) * (1 + yv)));
    }
}

TEST(Oscillation, ConstantOmegaClosedForm)
{
    const R c("4.45140273002");
    const auto e = constant_engine(fifth_map(), c);
    for (const char* y : {"0.1", "1", "10", "1e6"}) {
        const R yv = num(y);
        const R expect = pow(yv / c, e.gamma());
        EXPECT_TRUE(close(e.beta_inverse(yv).value, expect, R(1e-50) * expect));
    }
}

TEST(Oscillation, BetaRoundTrip)
{
    for (const auto* e : {&fifth_engine(), &quarter_engine()})
        for (const char* y : {"0.1", "1", "10"}) {
            const R yv = num(y);
            const auto X = e->beta_inverse(yv);
            const auto b = e->beta(X.value);
            EXPECT_TRUE(close(b.value, yv, b.err + R(1e-50)));
            EXPECT_LE(X.err, 10 * e->max_pointwise_error() * X.value);
        }
}

TEST(Oscillation, BetaInverseMatchesBisection)
{
    const auto& e = fifth_engine();
    const R y(1);
    R lo(1e-3), hi(10);
    ASSERT_LT(e.beta(lo).value, y);
    ASSERT_GT(e.beta(hi).value, y);
    for (int i = 0; i < 220; ++i) {
        const R mid = (lo + hi) / 2;
        (e.beta(mid).value < y ? lo : hi) = mid;
    }
    EXPECT_TRUE(close(e.beta_inverse(y).value, (lo + hi) / 2, R(1e-50)));
}

TEST(Oscillation, BetaInverseRejectsNonPositive)
{
    EXPECT_THROW(fifth_engine().beta_inverse(R(0)), domain_error);
    EXPECT_THROW(fifth_engine().beta(R(-1)), domain_error);
}

TEST(Oscillation, AlphaFirstOrderApproximation)
{
    const auto& e = fifth_engine();
    const auto& f = e.omega_summary();
    const R g1 = f.harmonics[0].amplitude.value;
    const R slope = 2 * pi_constant<R>() / e.log2();
    for (int j = 0; j < 10; ++j) {
        const R t = R(j) / 7;
        const auto a = e.alpha_at(t);
        const auto om = e.omega(e.gamma() * t - e.gamma() * log(f.mean.value));
        const R approx = 1 / pow(om.value, e.gamma());
        EXPECT_LE(abs(a.value - approx), 10 * g1 * g1 * slope * a.value);
    }
}

TEST(Oscillation, AlphaPeriodicity)
{
    for (const auto* e : {&fifth_engine(), &quarter_engine()}) {
        const R lw = log(e->w());
        for (int j = 0; j < 10; ++j) {
            const R t = R(j) / 3 - 1;
            const auto a = e->alpha_at(t);
            const auto b = e->alpha_at(t + lw);
            EXPECT_TRUE(close(a.value, b.value, 2 * std::max(a.err, b.err)));
        }
    }
}

TEST(Oscillation, OmegaAmplitudeFromAlpha)
{
    const auto& e = quarter_engine();
    const R c = e.c_frak();
    for (const char* x : {"-1", "0", "0.2"}) {
        const R xv = num(x);
        const auto O = e.Omega_at(xv);
        const auto a = e.alpha_at(xv + log(c));
        EXPECT_TRUE(close(O.value, pow(c, e.gamma()) * a.value, O.err + pow(c, e.gamma()) * a.err));
    }
    EXPECT_TRUE(close(e.amplitude_period(), log(R(1.5)), R(1e-58)));
}

TEST(Oscillation, AmplitudeFifthMap)
{
    const auto a = fifth_engine().amplitude(64, 4);
    EXPECT_TRUE(close(a.fourier.mean.value, num("1.01288677326"), R(1e-9)));
    EXPECT_TRUE(close(a.fourier.harmonics[0].amplitude.value, num("1.59e-8"), R(5e-10)));
}

TEST(Oscillation, AmplitudeQuarterMap)
{
    const auto a = quarter_engine().amplitude(64, 4);
    EXPECT_TRUE(close(a.fourier.mean.value, num("1.33381"), R(1e-5)));
    EXPECT_TRUE(close(a.oscillation.value, num("8.86e-8"), R(5e-10)));
    EXPECT_LT(a.oscillation.err, R(5e-10));
}

TEST(Oscillation, EllMatchesFreeEnergy)
{
    const auto& e = quarter_engine();
    const auto f = quarter_map();
    for (const char* h : {"1e-6", "1e-4", "1e-3"}) {
        const R hv = num(h);
        const auto a = e.ell(delta_of_h(f, hv));
        const auto b = free_energy(f, hv, R(1e-45));
        EXPECT_TRUE(close(a.value, b.value, a.err + b.err + R(1e-50))) << "h = " << h;
    }
}

TEST(Oscillation, EllDirectIterationAtSmallDelta)
{
    // h with delta(h) = 1e-4: delta is increasing, solve by bisection
    const auto& e = quarter_engine();
    const auto f = quarter_map();
    R lo(0), hi(1e-3);
    for (int i = 0; i < 220; ++i) {
        const R mid = (lo + hi) / 2;
        (delta_of_h(f, mid) < R(1e-4) ? lo : hi) = mid;
    }
    const auto a = e.ell(R(1e-4));
    const auto b = free_energy(f, (lo + hi) / 2, R(1e-45));
    EXPECT_TRUE(close(a.value, b.value, a.err + b.err + R(1e-50)));
}

TEST(Oscillation, EllAsymptoticBand)
{
    const auto& e = quarter_engine();
    const R l = e.lambda();
    const R c = ((1 - l) / l) * ((1 - l) / l);
    R amin(1e9), amax(0);
    for (int j = 0; j < 32; ++j) {
        const auto a = e.alpha_at(log(e.w()) * j / 32);
        amin = std::min(amin, a.value);
        amax = std::max(amax, a.value);
    }
    for (const char* d : {"1e-10", "1e-12", "1e-14"}) {
        const R dv = num(d);
        const R r = e.ell(dv).value / pow(dv * c, e.gamma());
        EXPECT_GE(r, amin - 10 * dv);
        EXPECT_LE(r, amax + 10 * dv);
    }
    EXPECT_THROW(e.ell(R(0)), domain_error);
    EXPECT_THROW(e.ell(l / (1 - l)), domain_error);
}

TEST(Oscillation, RequiresQuadraticMap)
{
    EXPECT_THROW(OscillationEngine<R>(PinningMap<R>::from_strings({"0.1", "0.2", "0.3", "0.4"})), domain_error);
}

TEST(Oscillation, TargetErrorIsEnforced)
{
    EngineOptions o;
    o.g_order = 5;
    o.phi_order = 3;
    o.depth_phi = 7;
    o.depth_g = 7;
    o.samples = 32;
    o.harmonics = 2;
    EXPECT_THROW(OscillationEngine<R>(fifth_map(), o), certification_error);
    o.target_error = 1e-12;
    const OscillationEngine<R> e(fifth_map(), o);
    EXPECT_LE(e.max_pointwise_error(), R(1e-12));
}
