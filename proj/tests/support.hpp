#pragma once

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oscamp/oscamp.hpp"

namespace oscamp::testing {

using R = mp_real;

inline PinningMap<R> quarter_map() { return PinningMap<R>::from_strings({"1/4", "0", "3/4"}); }
inline PinningMap<R> fifth_map() { return PinningMap<R>::from_strings({"1/10", "0", "9/10"}); }

/// Engines are expensive to build; tests in one binary share them.
inline const OscillationEngine<R>& quarter_engine()
{
    static const OscillationEngine<R> e(quarter_map());
    return e;
}

inline const OscillationEngine<R>& fifth_engine()
{
    static const OscillationEngine<R> e(fifth_map());
    return e;
}

inline R num(const char* s) { return from_rational<R>(parse_rational(s)); }

inline std::mt19937_64& rng()
{
    static std::mt19937_64 g(20240607);
    return g;
}

inline R uniform(double a, double b)
{
    std::uniform_real_distribution<double> u(a, b);
    return R(u(rng()));
}

inline ::testing::AssertionResult close(const R& a, const R& b, const R& tol)
{
    const R d = abs(a - b);
    if (d <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a.str(40) << " vs " << b.str(40) << ": difference " << d.str(6)
                                         << " exceeds " << tol.str(6);
}

}  // namespace oscamp::testing
