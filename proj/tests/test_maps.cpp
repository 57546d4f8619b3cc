#include <complex>

#include "support.hpp"

using namespace oscamp;
using namespace oscamp::testing;

TEST(Maps, DerivedConstantsQuarter)
{
    const auto f = quarter_map();
    EXPECT_EQ(f.degree(), 2);
    EXPECT_EQ(f.w(), num("3/2"));
    EXPECT_EQ(f.lambda(), num("1/2"));
    EXPECT_EQ(f.c_frak(), num("3/2"));
    EXPECT_TRUE(close(f.gamma(), log(R(2)) / log(R(1.5)), R(1e-55)));
    EXPECT_EQ(f.stable_fixed_point(), num("1/3"));
    EXPECT_EQ(f.c_lambda(), num("3/2"));  // (3/4)(1/2)/(1/4)
}

TEST(Maps, DerivedConstantsFifth)
{
    const auto f = fifth_map();
    EXPECT_TRUE(close(f.w(), num("1.8"), R(1e-58)));
    EXPECT_TRUE(close(f.lambda(), num("0.2"), R(1e-58)));
    EXPECT_TRUE(close(f.c_frak(), num("4.5"), R(1e-57)));
}

TEST(Maps, DefiningIdentities)
{
    for (const auto& f : {quarter_map(), fifth_map(), PinningMap<R>::from_strings({"0.2", "0.1", "0.7"})}) {
        EXPECT_TRUE(close(f.w(), f.derivative(R(1)), R(1e-58)));
        EXPECT_TRUE(close(f.lambda(), 2 - f.w(), R(0)));
        EXPECT_TRUE(close(f.gamma() * log(f.w()), log(R(2)), R(1e-58)));
        EXPECT_TRUE(close(f(R(1)), R(1), R(1e-58)));
        const R s = f.stable_fixed_point();
        EXPECT_TRUE(close(f(s), s, R(1e-58)));
    }
}

TEST(Maps, ExactFixedPointsInRationalMode)
{
    const auto f = PinningMap<rational>::from_strings({"1/4", "0", "3/4"});
    EXPECT_EQ(f(rational(1)), rational(1));
    EXPECT_EQ(f(rational(1, 3)), rational(1, 3));
}

TEST(Maps, RejectsInvalidWeights)
{
    using M = PinningMap<R>;
    EXPECT_THROW(M::from_strings({"0.5", "0.5"}), invalid_map_error);
    EXPECT_THROW(M::from_strings({"-0.1", "0.2", "0.9"}), invalid_map_error);
    EXPECT_THROW(M::from_strings({"0.2", "0.2", "0.2"}), invalid_map_error);
    EXPECT_THROW(M::from_strings({"0.5", "0.5", "0"}), invalid_map_error);
    EXPECT_THROW(M::from_strings({"0.5", "0", "0.5"}), invalid_map_error);  // w = 1
    EXPECT_THROW(M::from_strings({"0.6", "0.2", "0.2"}), invalid_map_error);
    EXPECT_THROW(M::from_strings({"0.1", "x", "0.9"}), invalid_argument_error);
    EXPECT_THROW(M::from_strings({"1/4", "0", "3/4", "0"}), invalid_map_error);
}

TEST(Maps, RenormalizesWithinTolerance)
{
    const auto f = PinningMap<R>::from_doubles({0.1, 0.0, 0.9});
    rational s(0);
    for (const auto& p : f.exact_weights()) s += p;
    EXPECT_EQ(s, rational(1));
}

TEST(Maps, CubicMapIsAcceptedOutsideQuadraticMachinery)
{
    const auto f = PinningMap<R>::from_strings({"0.1", "0.2", "0.3", "0.4"});
    EXPECT_EQ(f.degree(), 3);
    EXPECT_TRUE(close(f.w(), num("2"), R(1e-58)));
    EXPECT_THROW(f.lambda(), domain_error);
    EXPECT_THROW(to_logistic(f, R(0)), domain_error);
}

TEST(Maps, IterateFixedPoints)
{
    const auto f = quarter_map();
    EXPECT_EQ(iterate(f, R(1), 100).value, R(1));
    EXPECT_TRUE(close(iterate(f, R(1) / 3, 100).value, R(1) / 3, R(1e-58)));
    EXPECT_EQ(iterate(f, R(0.3), 0).value, R(0.3));
    EXPECT_THROW(iterate(f, R(1), -1), invalid_argument_error);
}

TEST(Maps, IterateThreeStepsByHand)
{
    // f(2) = 13/4, f(13/4) = 523/64, f(523/64) = 824683/16384
    const auto f = PinningMap<rational>::from_strings({"1/4", "0", "3/4"});
    EXPECT_EQ(iterate(f, rational(2), 1).value, rational(13, 4));
    EXPECT_EQ(iterate(f, rational(2), 2).value, rational(523, 64));
    EXPECT_EQ(iterate(f, rational(2), 3).value, rational(824683, 16384));
    EXPECT_TRUE(close(iterate(quarter_map(), R(2), 3).value, R(824683) / 16384, R(1e-55)));
}

TEST(Maps, IterateSemigroupExact)
{
    const auto f = PinningMap<rational>::from_strings({"1/4", "0", "3/4"});
    const rational x(2, 7);
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= 3; ++n)
            EXPECT_EQ(iterate(f, x, m + n).value, iterate(f, iterate(f, x, m).value, n).value);
}

TEST(Maps, IterateSignalsEscape)
{
    const auto f = quarter_map();
    auto o = iterate(f, R(2), 50);
    EXPECT_TRUE(o.escaped);
    EXPECT_LT(o.steps, 50);
    auto small = iterate(f, R(2), 50, 1e6);
    EXPECT_TRUE(small.escaped);
    EXPECT_LT(small.steps, o.steps);
    EXPECT_FALSE(iterate(f, R(0.9), 50).escaped);
}

TEST(Maps, LogisticConjugation)
{
    const auto f = quarter_map();
    EXPECT_EQ(to_logistic(f, R(1)), 1 - 1 / f.lambda());
    EXPECT_EQ(to_logistic(f, f.stable_fixed_point()), R(0));
    EXPECT_EQ(to_logistic(f, R(0)), num("0.5"));
}

TEST(Maps, ConjugationChainOnRandomComplexPoints)
{
    using C = std::complex<double>;
    const auto f = PinningMap<double>::from_strings({"1/4", "0", "3/4"});
    const double lam = f.lambda();
    std::uniform_real_distribution<double> u(-2, 2);
    int checked = 0;
    while (checked < 50) {
        const C x(u(rng()), u(rng()));
        if (std::abs(x - f.stable_fixed_point()) < 0.05) continue;
        const C fx = f(x);
        if (std::abs(fx - f.stable_fixed_point()) < 0.05) continue;
        const C l = to_logistic(f, x);
        EXPECT_LE(std::abs(to_logistic(f, fx) - logistic(lam, l)), 1e-12 * (1 + std::norm(l)));
        const C q = q_transform(f, x);
        EXPECT_LE(std::abs(q_transform(f, fx) - inverted_map(lam, q)), 1e-10 * (1 + std::norm(q)));
        EXPECT_LE(std::abs(q_inverse(f, q) - x), 1e-12 * (1 + std::abs(x)));
        ++checked;
    }
}

TEST(Maps, QTransformFixedPointAndPoles)
{
    for (const auto& f : {quarter_map(), fifth_map()}) {
        const R lam = f.lambda();
        const R q1 = lam / (1 - lam);
        EXPECT_TRUE(close(q_transform(f, R(1)), q1, R(1e-58)));
        EXPECT_TRUE(close(inverted_map(lam, q1), q1, R(1e-58)));
        EXPECT_THROW(q_transform(f, f.stable_fixed_point()), domain_error);
        EXPECT_THROW(q_inverse(f, R(0)), domain_error);
    }
}

TEST(Maps, DeltaIsLinearNearZero)
{
    for (const auto& f : {quarter_map(), fifth_map()}) {
        const R h(1e-6);
        const R d = delta_of_h(f, h);
        EXPECT_LE(abs(d / h / f.c_lambda() - 1), R(1e-4));
        // against the definition lambda/(1-lambda) - q(e^h)
        const R lam = f.lambda();
        EXPECT_TRUE(close(d, lam / (1 - lam) - q_transform(f, exp(h)), R(1e-50)));
    }
}

TEST(Maps, VOfDeltaAlongDeltaOfH)
{
    const auto f = fifth_map();
    for (const char* h : {"1e-8", "1e-3", "0.1"}) {
        const R hv = num(h);
        const R v = v_of_delta(f.lambda(), delta_of_h(f, hv));
        EXPECT_TRUE(close(v, f.c_frak() * expm1(hv), R(1e-55) * (1 + v)));
    }
    EXPECT_THROW(v_of_delta(f.lambda(), R(1)), domain_error);
}
