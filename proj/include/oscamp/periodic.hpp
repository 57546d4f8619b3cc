// Sampling of periodic functions on a uniform grid and trapezoidal estimates
// of mean and Fourier coefficients c_n = (1/T) int_a^{a+T} f(x) e^{-2 pi i n x / T} dx.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

template <class Real>
struct PeriodicSample
{
    Real start{};
    Real period{};
    std::vector<Real> x;
    std::vector<BoundedValue<Real>> values;

    std::size_t size() const { return values.size(); }

    Real max_err() const
    {
        Real m(0);
        for (const auto& v : values) m = std::max(m, v.err);
        return m;
    }
};

/// Evaluates fn on x_j = start + j T / m, j = 0..m-1. With threads > 1 the
/// grid is split into contiguous blocks; the result does not depend on the
/// thread count.
template <class Real, class Fn>
PeriodicSample<Real> sample(Fn&& fn, const Real& start, const Real& period, int m, int threads = 1)
{
    if (m < 4) throw invalid_argument_error("periodic sample needs m >= 4 points");
    if (!(period > 0)) throw invalid_argument_error("period must be positive");
    PeriodicSample<Real> s;
    s.start = start;
    s.period = period;
    s.x.resize(static_cast<std::size_t>(m));
    s.values.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) s.x[static_cast<std::size_t>(j)] = start + period * j / m;

    auto run = [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            try {
                s.values[static_cast<std::size_t>(j)] = fn(s.x[static_cast<std::size_t>(j)]);
            } catch (const error& e) {
                throw error(e.code(), "sample " + std::to_string(j) + ": " + e.what());
            }
        }
    };
    threads = std::max(1, std::min(threads, m));
    if (threads == 1) {
        run(0, m);
        return s;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex guard;
    for (int t = 0; t < threads; ++t) {
        const int lo = m * t / threads, hi = m * (t + 1) / threads;
        pool.emplace_back([&, lo, hi] {
            try {
                run(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return s;
}

template <class Real>
struct ComplexBounded
{
    BoundedValue<Real> re;
    BoundedValue<Real> im;

    Real abs() const
    {
        using std::sqrt;
        return sqrt(re.value * re.value + im.value * im.value);
    }
    Real abs_err() const
    {
        using std::sqrt;
        return sqrt(re.err * re.err + im.err * im.err);
    }
};

namespace detail {

template <class Real>
std::pair<Real, Real> trapezoid_coeff(const PeriodicSample<Real>& s, int n, int stride)
{
    using std::cos;
    using std::sin;
    const Real two_pi = 2 * pi_constant<Real>();
    Real re(0), im(0);
    int count = 0;
    for (std::size_t j = 0; j < s.size(); j += static_cast<std::size_t>(stride)) {
        const Real& f = s.values[j].value;
        if (n == 0) {
            re += f;
        } else {
            const Real theta = two_pi * n * s.x[j] / s.period;
            re += f * cos(theta);
            im -= f * sin(theta);
        }
        ++count;
    }
    return {re / count, im / count};
}

template <class Real>
Real mean_err(const PeriodicSample<Real>& s)
{
    Real acc(0);
    for (const auto& v : s.values) acc += v.err;
    return acc / static_cast<long>(s.size());
}

}  // namespace detail

/// Trapezoidal mean. err = mean pointwise err + 2 |M_m - M_{m/2}|.
template <class Real>
BoundedValue<Real> mean(const PeriodicSample<Real>& s)
{
    using std::abs;
    const auto full = detail::trapezoid_coeff(s, 0, 1);
    Real quad(0);
    if (s.size() % 2 == 0) quad = 2 * abs(full.first - detail::trapezoid_coeff(s, 0, 2).first);
    const Real value = full.first;
    return {value, detail::mean_err(s) + quad + rounding_allowance<Real>(static_cast<double>(s.size()), value),
            std::all_of(s.values.begin(), s.values.end(), [](const auto& v) { return v.certified; })};
}

/// Trapezoidal estimate of c_n; requires m >= 4 n.
template <class Real>
ComplexBounded<Real> coeff(const PeriodicSample<Real>& s, int n)
{
    using std::abs;
    if (n < 0) throw invalid_argument_error("harmonic index must be non-negative");
    if (static_cast<long>(s.size()) < 4L * n)
        throw invalid_argument_error("sample of size " + std::to_string(s.size()) + " is too small for harmonic " +
                                     std::to_string(n));
    const auto full = detail::trapezoid_coeff(s, n, 1);
    Real qre(0), qim(0);
    if (s.size() % 2 == 0) {
        const auto half = detail::trapezoid_coeff(s, n, 2);
        qre = 2 * abs(full.first - half.first);
        qim = 2 * abs(full.second - half.second);
    }
    const Real pe = detail::mean_err(s);
    Real scale(0);
    for (const auto& v : s.values) scale = std::max(scale, abs(v.value));
    const Real round = rounding_allowance<Real>(4.0 * static_cast<double>(s.size()), scale);
    const bool cert = std::all_of(s.values.begin(), s.values.end(), [](const auto& v) { return v.certified; });
    return {{full.first, pe + qre + round, cert}, {full.second, pe + qim + round, cert}};
}

template <class Real>
struct Harmonic
{
    int n = 0;
    ComplexBounded<Real> c;
    BoundedValue<Real> amplitude;  // g_n = 2 |c_n|
    Real phase{};                  // x_n in f ~ mean + g_n sin(2 pi n (x - x_n) / T)
};

template <class Real>
struct FourierSummary
{
    Real start{};
    Real period{};
    BoundedValue<Real> mean;
    std::vector<Harmonic<Real>> harmonics;
    Real sample_min{};
    Real sample_max{};
    Real max_pointwise_err{};

    /// mean + sum g_n sin(2 pi n (x - x_n) / T)
    Real reconstruct(const Real& x) const
    {
        using std::sin;
        Real acc = mean.value;
        const Real two_pi = 2 * pi_constant<Real>();
        for (const auto& h : harmonics) acc += h.amplitude.value * sin(two_pi * h.n * (x - h.phase) / period);
        return acc;
    }
};

template <class Real>
FourierSummary<Real> fourier_summary(const PeriodicSample<Real>& s, int n_max)
{
    using std::atan2;
    using std::floor;
    if (static_cast<long>(s.size()) < 4L * n_max)
        throw invalid_argument_error("sample too small for the requested number of harmonics");
    FourierSummary<Real> out;
    out.start = s.start;
    out.period = s.period;
    out.mean = mean(s);
    out.max_pointwise_err = s.max_err();
    out.sample_min = s.values.front().value;
    out.sample_max = s.values.front().value;
    for (const auto& v : s.values) {
        out.sample_min = std::min(out.sample_min, v.value);
        out.sample_max = std::max(out.sample_max, v.value);
    }
    const Real pi = pi_constant<Real>();
    for (int n = 1; n <= n_max; ++n) {
        Harmonic<Real> h;
        h.n = n;
        h.c = coeff(s, n);
        h.amplitude = {2 * h.c.abs(), 2 * h.c.abs_err(), h.c.re.certified};
        // c_n = (g_n / 2i) e^{-2 pi i n x_n / T}
        const Real arg = atan2(h.c.im.value, h.c.re.value);
        const Real span = s.period / n;
        Real x = -(arg + pi / 2) * s.period / (2 * pi * n);
        x -= span * floor((x - s.start) / span);
        h.phase = x;
        out.harmonics.push_back(h);
    }
    return out;
}

}  // namespace oscamp
