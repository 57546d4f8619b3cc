// Moment generating function psi(s) = E[e^{s W}] of the martingale limit W of
// the Galton-Watson process with offspring law p_0..p_d, the Harris function
// L(log s) = s^{-gamma} F(log psi(s)), and a seeded Monte-Carlo simulator.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/free_energy.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/oscillation.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

/// f_n(e^{s / w^n}), iterated in the variable u = x - 1 to keep digits near
/// the fixed point. The error is the heuristic |psi_n - psi_{n-1}| / (w - 1)
/// and is flagged as not certified.
template <class Real>
BoundedValue<Real> psi_direct(const PinningMap<Real>& map, const Real& s, int n)
{
    using std::abs;
    using std::expm1;
    using std::pow;
    if (n < 1) throw invalid_argument_error("psi_direct needs n >= 1");
    if (s == 0) return {Real(1), Real(0), true};
    const auto a = map.shifted_at_one();
    auto step = [&](const Real& u) {
        Real acc(0);
        for (std::size_t k = a.size(); k-- > 1;) acc = (acc + a[k]) * u;
        return acc;
    };
    const Real wn = pow(map.w(), n);
    Real u = expm1(s / wn);
    for (int i = 0; i < n; ++i) u = step(u);
    Real v = expm1(s / (wn / map.w()));
    for (int i = 0; i < n - 1; ++i) v = step(v);
    const Real err = abs(u - v) / (map.w() - 1);
    return {1 + u, err, false};
}

/// psi_direct with n doubled until the heuristic error is below tol.
template <class Real>
BoundedValue<Real> psi_direct_converged(const PinningMap<Real>& map, const Real& s, const Real& tol,
                                        int n_max = 2000)
{
    for (int n = 16;; n *= 2) {
        const int m = std::min(n, n_max);
        auto v = psi_direct(map, s, m);
        if (v.err <= tol) return v;
        if (m == n_max) throw convergence_error("psi_direct did not stabilize below the tolerance at n = " + std::to_string(n_max));
    }
}

/// psi(s) = q^{-1}(1 / phi(e^{-X})) = (p0 + lambda phi(e^{-X})) / p2 with X = beta^{-1}(c s).
template <class Real>
BoundedValue<Real> psi_boettcher(const OscillationEngine<Real>& engine, const Real& s)
{
    using std::abs;
    using std::exp;
    if (s == 0) return {Real(1), Real(0), true};
    if (!(s > 0)) throw domain_error("psi_boettcher expects s >= 0");
    const auto& map = engine.map();
    const auto X = engine.invert_beta(engine.c_frak() * s);
    const auto P = engine.phi(exp(-X.X));
    // d phi(e^{-X}) / dX by a central difference
    const Real h = X.X * Real(1e-15);
    const Real dphi = abs(engine.phi(exp(-(X.X + h))).value - engine.phi(exp(-(X.X - h))).value) / (2 * h);
    const Real k = map.lambda() / map.p(2);
    const Real value = (map.p(0) + map.lambda() * P.value) / map.p(2);
    const Real err = k * (P.err + Real(1.1) * dphi * X.err) + rounding_allowance<Real>(8, value);
    return {value, err, P.certified};
}

/// L(log s) = s^{-gamma} F(log psi(s)).
template <class Real>
BoundedValue<Real> harris_L(const OscillationEngine<Real>& engine, const Real& s, const Real& tol = Real(1e-40))
{
    using std::log;
    using std::pow;
    if (!(s > 0)) throw domain_error("harris_L expects s > 0");
    const auto psi = psi_boettcher(engine, s);
    if (!(psi.value - psi.err > 1)) throw precision_error("psi(s) is not separated from 1; raise the precision");
    const auto F = free_energy(engine.map(), log(psi.value), tol);
    const Real dlog = psi.err / (psi.value - psi.err);  // F is 1-Lipschitz
    const Real f = pow(s, -engine.gamma());
    return {f * F.value, f * (F.err + dlog) + rounding_allowance<Real>(8, f * F.value), psi.certified && F.certified};
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MgfEstimate
{
    double s = 0;
    double value = 0;
    double se = 0;
};

struct GWRun
{
    std::vector<double> weights;
    int generations = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    int shards = 0;
    double mean_w = 0;  // mean of W_n / w^n
    double var_w = 0;
    double se_mean_w = 0;
    double extinction = 0;  // fraction with Z_n = 0
    double extinction_se = 0;
    std::vector<MgfEstimate> mgf;
};

struct SimulationOptions
{
    int shards = 64;
    int threads = 1;
    std::uint64_t population_cap = 100000000ULL;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct ShardSums
{
    long count = 0;
    long extinct = 0;
    long double sum_w = 0, sum_w2 = 0;
    std::vector<long double> sum_e, sum_e2;
};

}  // namespace detail

/// Simulates `samples` independent processes for n generations. Samples are
/// split into a fixed number of shards, shard k drawing from mt19937_64 seeded
/// with splitmix64(seed + k); per-shard sums are merged in shard order, so
/// the output does not depend on the thread count.
template <class Real>
GWRun simulate_gw(const PinningMap<Real>& map, int n, long samples, std::uint64_t seed,
                  const std::vector<double>& s_grid, const SimulationOptions& options = {})
{
    if (samples < 1000) throw invalid_argument_error("simulate_gw needs at least 1000 samples");
    if (n < 1) throw invalid_argument_error("simulate_gw needs n >= 1");
    if (options.shards < 1) throw invalid_argument_error("need at least one shard");

    const int d = map.degree();
    std::vector<double> p;
    for (const auto& q : map.exact_weights()) p.push_back(static_cast<double>(q));
    // inverse CDF on raw 64-bit draws: offspring = number of thresholds <= u
    std::vector<std::uint64_t> thresholds;
    const boost::multiprecision::mpz_int two64 = boost::multiprecision::mpz_int(1) << 64;
    rational cum(0);
    for (int i = 0; i < d; ++i) {
        cum += map.exact_weights()[static_cast<std::size_t>(i)];
        const boost::multiprecision::mpz_int t = numerator(cum) * two64 / denominator(cum);
        thresholds.push_back(t >= two64 ? ~0ULL : t.convert_to<std::uint64_t>());
    }
    const double w = static_cast<double>(map.w());
    const double wn = std::pow(w, n);

    std::vector<detail::ShardSums> sums(static_cast<std::size_t>(options.shards));
    auto run_shard = [&](int k) {
        auto& out = sums[static_cast<std::size_t>(k)];
        out.sum_e.assign(s_grid.size(), 0);
        out.sum_e2.assign(s_grid.size(), 0);
        std::mt19937_64 rng(detail::splitmix64(seed + static_cast<std::uint64_t>(k)));
        const long lo = samples * k / options.shards, hi = samples * (k + 1) / options.shards;
        for (long i = lo; i < hi; ++i) {
            std::uint64_t z = 1;
            for (int g = 0; g < n && z > 0; ++g) {
                std::uint64_t next = 0;
                for (std::uint64_t j = 0; j < z; ++j) {
                    const std::uint64_t u = rng();
                    int c = 0;
                    while (c < d && u >= thresholds[static_cast<std::size_t>(c)]) ++c;
                    next += static_cast<std::uint64_t>(c);
                }
                if (next > options.population_cap)
                    throw convergence_error("population exceeded the cap of " + std::to_string(options.population_cap));
                z = next;
            }
            const long double W = static_cast<long double>(z) / wn;
            ++out.count;
            if (z == 0) ++out.extinct;
            out.sum_w += W;
            out.sum_w2 += W * W;
            for (std::size_t j = 0; j < s_grid.size(); ++j) {
                const long double e = std::exp(static_cast<long double>(s_grid[j]) * W);
                out.sum_e[j] += e;
                out.sum_e2[j] += e * e;
            }
        }
    };

    const int threads = std::max(1, std::min(options.threads, options.shards));
    if (threads == 1) {
        for (int k = 0; k < options.shards; ++k) run_shard(k);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int k = t; k < options.shards; k += threads) run_shard(k);
                } catch (...) {
                    failures[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& f : failures)
            if (f) std::rethrow_exception(f);
    }

    detail::ShardSums total;
    total.sum_e.assign(s_grid.size(), 0);
    total.sum_e2.assign(s_grid.size(), 0);
    for (const auto& s : sums) {
        total.count += s.count;
        total.extinct += s.extinct;
        total.sum_w += s.sum_w;
        total.sum_w2 += s.sum_w2;
        for (std::size_t j = 0; j < s_grid.size(); ++j) {
            total.sum_e[j] += s.sum_e[j];
            total.sum_e2[j] += s.sum_e2[j];
        }
    }
    const long double N = static_cast<long double>(total.count);
    GWRun run;
    run.weights = p;
    run.generations = n;
    run.samples = total.count;
    run.seed = seed;
    run.shards = options.shards;
    const long double mw = total.sum_w / N;
    const long double vw = (total.sum_w2 / N - mw * mw) * N / (N - 1);
    run.mean_w = static_cast<double>(mw);
    run.var_w = static_cast<double>(vw);
    run.se_mean_w = static_cast<double>(std::sqrt(vw / N));
    const long double pe = static_cast<long double>(total.extinct) / N;
    run.extinction = static_cast<double>(pe);
    run.extinction_se = static_cast<double>(std::sqrt(pe * (1 - pe) / N));
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
        const long double m = total.sum_e[j] / N;
        const long double v = (total.sum_e2[j] / N - m * m) * N / (N - 1);
        run.mgf.push_back({s_grid[j], static_cast<double>(m), static_cast<double>(std::sqrt(v / N))});
    }
    return run;
}

}  // namespace oscamp
