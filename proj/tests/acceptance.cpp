// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "oracles.hpp"
#include "s2s/arith.hpp"
#include "s2s/correlation.hpp"
#include "s2s/singular.hpp"
#include "s2s/sieve.hpp"
#include "s2s/two_squares.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace s2s;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0 = no runtime limit
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome r2_exactness() {
    FactorSieve s = build_factor_sieve(1, 100001);
    for (uint64_t n = 1; n <= 100000; ++n) {
        Factorization f = s.factorize(n);
        const uint64_t lat = oracle::lattice_r2(n);
        if (r2(f) != lat || r2_divisor_sum(f) != static_cast<int64_t>(lat))
            return {false, "mismatch at n=" + std::to_string(n)};
    }
    return {true, "n <= 1e5"};
}

Outcome enumeration_methods() {
    const std::pair<uint64_t, uint64_t> ranges[] = {{1, 1000000}, {1000000000, 1000100000}};
    for (auto [lo, hi] : ranges) {
        TwoSquaresRange a = enumerate_E(lo, hi + 1, EMethod::lattice);
        TwoSquaresRange b = enumerate_E(lo, hi + 1, EMethod::factorization);
        if (!a.same_membership(b)) return {false, "differ on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
    }
    return {true, "both windows identical"};
}

Outcome constant_V_check() {
    const double v = constant_V(1000000).value;
    return {v >= 1.015 && v <= 1.017, fmt("V = %.12f", v)};
}

Outcome constant_A_check() {
    EulerProductResult a4 = landau_ramanujan_A(10000), a7 = landau_ramanujan_A(10000000);
    const double g4 = std::abs(a4.form1 - a4.form3), g7 = std::abs(a7.form1 - a7.form3);
    return {g7 < 1e-4 && g7 < g4, fmt("gap %.3e at 1e7, ", g7) + fmt("%.3e at 1e4", g4)};
}

Outcome functionals() {
    const double pi = std::numbers::pi;
    double worst = 0, worst_ratio = 0;
    for (unsigned K = 1; K <= 6; ++K) {
        const double L = functional_L(K, LVariant::plain).value;
        worst = std::max(worst, std::abs(L - std::pow((pi + 2) / (4 * std::sqrt(double(K))), K)));
        const double r1 = functional_L(K, LVariant::single).value / L;
        worst_ratio = std::max(worst_ratio, std::abs(r1 - pi * pi / ((pi + 2) * std::sqrt(double(K)))));
        if (K >= 2) {
            const double r2v = functional_L(K, LVariant::dbl).value / L;
            worst_ratio = std::max(worst_ratio, std::abs(r2v - std::pow(pi * pi / (pi + 2), 2) / K));
        }
    }
    return {worst < 1e-8 && worst_ratio < 1e-6, fmt("max residual %.2e, ", worst) + fmt("ratios %.2e", worst_ratio)};
}

std::vector<Rational> test_vector(std::size_t n) {
    std::vector<Rational> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = Rational(long(3 * i + 1), long(i % 4 + 1));
        y[i].canonicalize();
    }
    return y;
}

Outcome mobius_round_trips() {
    const std::vector<std::vector<uint64_t>> pools = {{7}, {7, 11}, {7, 11, 19}, {19, 31, 43}};
    unsigned n = 0;
    for (auto& pool : pools)
        for (unsigned K = 1; K <= 4; ++K)
            for (double R : {50.0, 1e3, 1e6}) {
                DKSpace sp = build_DK_space(K, pool, std::log(R));
                WeightTable t = build_weight_table(sp);
                if (!t.exact) return {false, "table not exact"};
                std::vector<Rational> y = test_vector(sp.tuples.size());
                if (y_from_lambda(sp, t.lambda_exact) != t.y_exact || y_from_lambda(sp, lambda_from_y(sp, y)) != y)
                    return {false, "lambda/y on pool of " + std::to_string(pool.size())};
                ++n;
            }
    const std::vector<std::vector<uint64_t>> tpools = {{3}, {3, 7, 11}, {3, 7, 11, 19, 23, 31}, {7, 11, 19, 23, 31, 43}};
    for (auto& primes : tpools)
        for (double X : {100.0, 5000.0, 1e6}) {
            TildeWeights tw = build_tilde_weights(primes, X);
            if (!tw.exact) return {false, "tilde table not exact"};
            std::vector<Rational> y = test_vector(tw.support.size());
            if (tilde_y_from_lambda(tw, tilde_lambda_from_y(tw, y)) != y ||
                tilde_lambda_from_y(tw, tilde_y_from_lambda(tw, tw.lambda_exact)) != tw.lambda_exact)
                return {false, "tilde on " + std::to_string(primes.size()) + " primes"};
            ++n;
        }
    return {true, std::to_string(n) + " tables"};
}

Outcome local_factors() {
    uint64_t n = 0;
    for (uint64_t p : primes_up_to(50)) {
        const uint64_t other = p == 3 ? 5 : 3;
        for (SigmaVariant v : {SigmaVariant::S5T, SigmaVariant::S5main, SigmaVariant::S6})
            for (unsigned K = 1; K <= 4; ++K)
                for (const SigmaInputs& in : sigma_case_configurations(v, p, K, other)) {
                    if (sigma_local(v, p, in) != sigma_bruteforce(v, p, in))
                        return {false, "p=" + std::to_string(p) + " K=" + std::to_string(K)};
                    ++n;
                }
    }
    return {true, std::to_string(n) + " configurations"};
}

Outcome gallagher_identity() {
    uint64_t n = 0;
    for (unsigned K = 1; K <= 6; ++K) {
        std::vector<uint64_t> ps;
        for (uint64_t p : primes_up_to(50))
            if (p > K + 1) ps.push_back(p);
        for (uint64_t mask = 1; mask < (1ull << ps.size()); ++mask) {
            uint64_t r = 1;
            for (std::size_t j = 0; j < ps.size(); ++j)
                if (mask >> j & 1) r *= ps[j];
            if (A_r_identity(r, K) != 0) return {false, "A(" + std::to_string(r) + ") != 0 at K=" + std::to_string(K)};
            ++n;
        }
    }
    return {true, std::to_string(n) + " values of r"};
}

Outcome hooley_product() {
    double worst = 0;
    for (uint64_t h : {1ull, 4ull, 25ull, 100ull})
        for (uint64_t q1 : {1ull, 5ull}) {
            HooleyProduct hp = hooley_t_product(h, q1, 200000);
            worst = std::max(worst, std::abs(hp.partial_sum - hp.closed_product));
        }
    return {worst < 1e-6, fmt("max gap %.2e", worst)};
}

Outcome ap_band() {
    const double a = sum_r2_in_ap(1000000, 1, 1, 1).ratio, b = sum_r2_in_ap(1000000, 5, 1, 13).ratio;
    return {a >= 0.99 && a <= 1.01 && b >= 0.9 && b <= 1.1, fmt("ratios %.5f", a) + fmt(", %.5f", b)};
}

Outcome pair_zero_case() {
    struct Z {
        uint64_t r, alpha;
        int64_t h;
        uint64_t c1, c2;
    };
    const Z grid[] = {{1, 1, 4, 3, 3},   {1, 1, 8, 3, 15},  {1, 1, 4, 5, 5},    {1, 1, 8, 5, 15},   {1, 1, 4, 7, 7},
                      {1, 1, 8, 7, 21},  {1, 1, 12, 5, 35}, {1, 1, 16, 11, 11}, {1, 1, 20, 3, 33},  {1, 1, 4, 15, 15},
                      {7, 1, 4, 3, 3},   {7, 2, 8, 5, 5},   {11, 3, 4, 15, 15}, {13, 1, 8, 5, 55}, {5, 1, 8, 3, 21},
                      {5, 2, 4, 11, 33}, {3, 1, 4, 7, 35},  {3, 2, 20, 13, 13}, {1, 1, 28, 3, 3},   {1, 1, 44, 7, 7}};
    for (const Z& z : grid) {
        if (static_cast<uint64_t>(z.h) % std::gcd(z.c1, z.c2) == 0) return {false, "grid entry is not a zero case"};
        ExperimentReport rep = sum_r2_pair(50000, z.r, z.alpha, z.h, z.c1, z.c2, 20000);
        if (rep.empirical != 0 || rep.extra_value("gamma") != 0) return {false, "nonzero at c1=" + std::to_string(z.c1)};
    }
    return {true, "20 configurations"};
}

Outcome pattern_surrogate() {
    PatternTable lo = pattern_distribution(10000000, 5, 4), hi = pattern_distribution(100000000, 5, 4);
    uint64_t smallest = UINT64_MAX;
    for (uint64_t a1 = 1; a1 <= 4; ++a1)
        for (uint64_t a2 = 1; a2 <= 4; ++a2) {
            const std::vector<uint64_t> pat = {a1, a1, a2, a2};
            const uint64_t c7 = lo.count_of(pat), c8 = hi.count_of(pat);
            if (c8 == 0 || c8 <= c7) return {false, "pattern " + pattern_label(pat)};
            smallest = std::min(smallest, c8);
        }
    return {true, "16 patterns, smallest count at 1e8: " + std::to_string(smallest)};
}

SSumConfig s_config(std::size_t pool) {
    SSumConfig c;
    c.params.x = 1e6;
    c.params.q = 1;
    c.params.eta = 2;
    c.params.M = 2;
    c.params.k = 1;
    c.params.M1 = 1;
    c.params.theta1 = 0.1;
    c.params.theta2 = 1.0;
    c.params.xi = 0.2;
    c.params.exploratory = true;
    c.b = {3, 7};
    c.max_pool = pool;
    return c;
}

Outcome s_sum_structure() {
    SSumResult empty = empirical_S_all(s_config(0));
    const double count = empty.S[0].extra_value("count");
    if (!empty.pool.empty() || empty.S[0].empirical != count * empty.lambda1 * empty.lambda1)
        return {false, "S1 with empty pool is not count * lambda1^2"};
    SSumResult two = empirical_S_all(s_config(2));
    if (two.pool.size() != 2) return {false, "pool did not reach 2 primes"};
    const double ratio = two.S[2].empirical / two.S[2].predicted;
    return {two.S[2].empirical <= 1.25 * two.S[2].predicted, fmt("S3 / envelope = %.4f", ratio)};
}

// Toy: q = 1, one form n + 4, window n+1 .. n+4 (eta sqrt(log x) = 4.4).
Outcome witness_soundness() {
    SieveParams P;
    P.q = 1;
    P.M = 1;
    P.M1 = 1;
    P.k = 1;
    P.x = 1e5;
    P.eta = 1.3;
    P.xi = 0.3;
    LinearFormTuple t = s2s::make_tuple(P, {3});
    FactorSieve s = build_factor_sieve(1, 100100);
    uint64_t found = 0;
    for (uint64_t n = 1; n <= 100000; ++n) {
        WitnessReport w = verify_witness(n, t, P, s);
        if (!w.all()) continue;
        ++found;
        const uint64_t form = t.eval(0, n);
        bool ok = w.consecutive && w.E_members == std::vector<uint64_t>{form} && oracle::lattice_in_E(form) &&
                  w.window_lo <= form && form <= w.window_hi;
        for (uint64_t m = w.window_lo; m <= w.window_hi && ok; ++m)
            if (m != form && oracle::lattice_in_E(m)) ok = false;
        if (!ok) return {false, "witness n=" + std::to_string(n) + " fails the oracle"};
    }
    return {found > 0, std::to_string(found) + " witnesses"};
}

}  // namespace

int main() {
    const std::vector<Criterion> crit = {
        {1, "r2 divisor-sum formula equals lattice counting", 10, r2_exactness},
        {2, "lattice and factorization enumeration agree", 60, enumeration_methods},
        {3, "constant V in [1.015, 1.017]", 5, constant_V_check},
        {4, "Landau-Ramanujan product forms converge", 60, constant_A_check},
        {5, "sieve functionals match closed forms", 10, functionals},
        {6, "Mobius round-trips are exact", 0, mobius_round_trips},
        {7, "local factors equal brute-force sums", 0, local_factors},
        {8, "Gallagher identity A(r) = 0", 30, gallagher_identity},
        {9, "Hooley t-product converges", 10, hooley_product},
        {10, "r2 in progressions within bands", 30, ap_band},
        {11, "pair correlation zero case", 0, pair_zero_case},
        {12, "consecutive patterns mod 5 positive and growing", 300, pattern_surrogate},
        {13, "S-sum structural checks", 300, s_sum_structure},
        {14, "witness checker soundness", 0, witness_soundness},
    };
    int failed = 0;
    for (const Criterion& c : crit) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s limit", c.limit_s);
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(crit.size()) - failed, crit.size());
    return failed ? 1 : 0;
}
