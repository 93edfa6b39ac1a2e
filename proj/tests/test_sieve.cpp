#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "s2s/sieve.hpp"

#include <numbers>

using namespace s2s;

namespace {

// All assignments of pool primes to {unused, coordinate 1..K} with product < R.
std::set<DTuple> dk_bruteforce(unsigned K, const std::vector<uint64_t>& pool, double R) {
    std::set<DTuple> out;
    uint64_t total = 1;
    for (std::size_t i = 0; i < pool.size(); ++i) total *= K + 1;
    for (uint64_t code = 0; code < total; ++code) {
        DTuple d(K, 1);
        uint64_t c = code;
        double prod = 1;
        for (uint64_t p : pool) {
            const unsigned slot = c % (K + 1);
            c /= K + 1;
            if (slot) {
                d[slot - 1] *= p;
                prod *= double(p);
            }
        }
        if (prod < R) out.insert(d);
    }
    return out;
}

double phi_of(const DTuple& d) {
    double r = 1;
    for (uint64_t v : d) r *= double(oracle::phi(v));
    return r;
}

LinearFormTuple simple_tuple(std::vector<int64_t> offsets) {
    LinearFormTuple t;
    t.q = 1;
    t.a = std::move(offsets);
    t.b.assign(t.a.size(), 0);
    t.M = static_cast<unsigned>(t.a.size());
    return t;
}

}  // namespace

TEST_CASE("F and g") {
    CHECK(F_eval({0.0, 0.0}) == 1.0);
    CHECK(F_eval({0.6, 0.0}) == 0.0);
    CHECK(F_eval({1.0}) == 0.5);
    CHECK(g_of_t(1.0) == 0.5);
    CHECK(g_of_t(1.0 + 1e-12) == 0.0);
}

TEST_CASE("D_K enumeration is exhaustive and within constraints") {
    const std::vector<uint64_t> pool = {7, 11, 19, 23, 31};
    for (unsigned K : {1u, 2u, 3u})
        for (double R : {50.0, 300.0, 5000.0}) {
            DKSpace sp = build_DK_space(K, pool, std::log(R));
            std::set<DTuple> got(sp.tuples.begin(), sp.tuples.end());
            CHECK(got.size() == sp.tuples.size());
            CHECK(got == dk_bruteforce(K, pool, R));
            CHECK(sp.tuples[0] == DTuple(K, 1));
            for (std::size_t i = 0; i < sp.tuples.size(); ++i) CHECK(sp.find(sp.tuples[i]) == i);
            for (auto& d : sp.tuples)
                for (uint64_t v : d)
                    for (auto& [p, e] : oracle::factor(v)) {
                        CHECK(p % 4 == 3);
                        CHECK(e == 1);
                    }
        }
    CHECK_THROWS_AS(build_DK_space(2, {7, 11}, std::log(1e9), 5), ResourceError);
    CHECK_THROWS_AS(build_DK_space(2, {5}, std::log(100.0)), ValidationError);
}

TEST_CASE("empty pool gives the single all-ones tuple with lambda 1") {
    DKSpace sp = build_DK_space(3, {}, std::log(100.0));
    WeightTable t = build_weight_table(sp);
    REQUIRE(t.space.tuples.size() == 1);
    CHECK(t.lambda[0] == 1.0);
    CHECK(t.lambda_exact[0] == 1);
}

TEST_CASE("lambda_1 equals the sum of y_r / phi(r)") {
    const std::vector<uint64_t> pool = {7, 11, 19};
    DKSpace sp = build_DK_space(2, pool, std::log(2000.0));
    WeightTable t = build_weight_table(sp);
    REQUIRE(t.exact);
    Rational s(0);
    for (std::size_t i = 0; i < sp.tuples.size(); ++i) {
        Rational ph(1);
        for (uint64_t v : sp.tuples[i]) ph *= Rational(static_cast<unsigned long>(oracle::phi(v)));
        s += t.y_exact[i] / ph;
    }
    CHECK(t.lambda_exact[0] == s);
    CHECK(t.lambda[0] > 0);
}

TEST_CASE("Mobius round-trips are exact on pools of at most 3 primes") {
    const std::vector<std::vector<uint64_t>> pools = {{7}, {7, 11}, {7, 11, 19}, {11, 23, 43}};
    for (auto& pool : pools)
        for (unsigned K : {1u, 2u, 3u, 4u})
            for (double R : {100.0, 1e4, 1e6}) {
                DKSpace sp = build_DK_space(K, pool, std::log(R));
                WeightTable t = build_weight_table(sp);
                REQUIRE(t.exact);
                CHECK(y_from_lambda(sp, t.lambda_exact) == t.y_exact);
                CHECK(lambda_from_y(sp, t.y_exact) == t.lambda_exact);
                // Arbitrary rational y also round-trips.
                std::vector<Rational> y(sp.tuples.size());
                for (std::size_t i = 0; i < y.size(); ++i) {
                    y[i] = Rational(long(i * 7 + 3), long(i + 2));
                    y[i].canonicalize();
                }
                CHECK(y_from_lambda(sp, lambda_from_y(sp, y)) == y);
            }
}

TEST_CASE("lambda support and the floating table") {
    DKSpace sp = build_DK_space(2, {7, 11, 19}, std::log(500.0));
    WeightTable t = build_weight_table(sp);
    CHECK(t.lambda_of({7 * 11 * 19, 1}) == 0.0);  // product above R
    CHECK(t.lambda_of({7, 7}) == 0.0);            // prime in two coordinates
    CHECK(t.lambda_of({5, 1}) == 0.0);            // not built from the pool
    for (std::size_t i = 0; i < sp.tuples.size(); ++i) CHECK(t.lambda[i] == doctest::Approx(t.lambda_exact[i].get_d()));
    std::vector<double> lf = lambda_from_y(sp, t.y);
    for (std::size_t i = 0; i < lf.size(); ++i) CHECK(lf[i] == doctest::Approx(t.lambda[i]).epsilon(1e-12));
}

TEST_CASE("w_n against the direct divisor sum") {
    const std::vector<uint64_t> pool = {7, 11, 19};
    DKSpace sp = build_DK_space(2, pool, std::log(3000.0));
    WeightTable t = build_weight_table(sp);
    LinearFormTuple tup = simple_tuple({4, 12});
    for (uint64_t n = 1; n < 5000; ++n) {
        double direct = 0;
        for (std::size_t i = 0; i < sp.tuples.size(); ++i) {
            bool div = true;
            for (unsigned j = 0; j < 2; ++j) div &= tup.eval(j, n) % sp.tuples[i][j] == 0;
            if (div) direct += t.lambda[i];
        }
        REQUIRE(w_n(n, tup, t) == doctest::Approx(direct * direct).epsilon(1e-12));
        REQUIRE(w_n(n, tup, t) >= 0);
        bool coprime = true;
        for (uint64_t p : pool)
            for (unsigned j = 0; j < 2; ++j) coprime &= tup.eval(j, n) % p != 0;
        if (coprime) REQUIRE(w_n(n, tup, t) == t.lambda[0] * t.lambda[0]);
    }
}

TEST_CASE("w_n stays under the prime-count bound") {
    const std::vector<uint64_t> pool = {7, 11, 19, 23};
    DKSpace sp = build_DK_space(2, pool, std::log(5000.0));
    WeightTable t = build_weight_table(sp);
    LinearFormTuple tup = simple_tuple({4, 12});
    const double scale = std::pow(std::log(5000.0) / std::log(7.0), 2);
    double measured = 0;
    for (uint64_t n = 1; n < 20000; ++n) {
        unsigned omega = 0;
        for (uint64_t p : pool)
            for (unsigned j = 0; j < 2; ++j) omega += tup.eval(j, n) % p == 0;
        measured = std::max(measured, w_n(n, tup, t) / (scale * std::pow(4.0, omega)));
    }
    MESSAGE("measured C_K for the w_n bound: " << measured);
    CHECK(measured > 0);
    CHECK(measured < 10);
}

TEST_CASE("functionals match closed forms") {
    CHECK(functional_L_closed(1, LVariant::plain) == doctest::Approx((std::numbers::pi + 2) / 4));
    const double pi = std::numbers::pi;
    for (unsigned K = 1; K <= 6; ++K) {
        const double plain = functional_L(K, LVariant::plain).value;
        CHECK(std::abs(plain - std::pow((pi + 2) / (4 * std::sqrt(double(K))), K)) < 1e-8);
        const double single = functional_L(K, LVariant::single).value;
        CHECK(std::abs(single / plain - pi * pi / ((pi + 2) * std::sqrt(double(K)))) < 1e-6);
        if (K >= 2) {
            const double dbl = functional_L(K, LVariant::dbl).value;
            CHECK(std::abs(dbl / plain - std::pow(pi * pi / (pi + 2), 2) / K) < 1e-6);
        }
    }
}

TEST_CASE("y perturbation") {
    const double lR = std::log(1e5);
    PerturbationReport same = y_perturbation_check({7, 11}, {7, 11}, lR);
    CHECK(same.applicable);
    CHECK(same.y_r == same.y_s);
    PerturbationReport one = y_perturbation_check({7, 11}, {7 * 19, 11}, lR);
    REQUIRE(one.applicable);
    CHECK(one.part == 1);
    CHECK(std::abs(one.y_s - one.y_r) <= 2 * std::log(19.0) / lR * one.y_r * 1.0001);
    PerturbationReport swap = y_perturbation_check({7 * 11, 19}, {7, 11 * 19}, lR);
    REQUIRE(swap.applicable);
    CHECK(swap.part == 2);
    CHECK(swap.measured_C < 2);
}

TEST_CASE("decoupling gap shrinks as D0 grows") {
    const double lR = std::log(1e8);
    std::vector<uint64_t> all;
    for (uint64_t p = 3; p < 400; ++p)
        if (oracle::is_prime(p) && p % 4 == 3) all.push_back(p);
    double prev = 1e9;
    for (uint64_t D0 : {3ull, 20ull, 60ull}) {
        std::vector<uint64_t> pool;
        for (uint64_t p : all)
            if (p > D0) pool.push_back(p);
        pool.resize(std::min<std::size_t>(pool.size(), 18));
        DecouplingReport r = decoupling_check(2, pool, lR);
        CHECK(std::abs(r.relative_gap) < prev);
        prev = std::abs(r.relative_gap);
    }
}

TEST_CASE("lambda bound does not grow with R") {
    const std::vector<uint64_t> pool = {7, 11, 19, 23, 31};
    WeightTable a = build_weight_table(build_DK_space(2, pool, std::log(1e3)));
    WeightTable b = build_weight_table(build_DK_space(2, pool, std::log(1e5)));
    LambdaBoundReport ra = lambda_bound(a, std::log(7.0)), rb = lambda_bound(b, std::log(7.0));
    MESSAGE("measured C_K " << ra.measured_C << " at R=1e3, " << rb.measured_C << " at R=1e5");
    CHECK(rb.measured_C <= ra.measured_C * 1.0001);
}

TEST_CASE("tilde weights") {
    const std::vector<uint64_t> primes = {3, 7, 11, 19, 23, 31};
    TildeWeights tw = build_tilde_weights(primes, 3000.0);
    REQUIRE(tw.exact);
    Rational s(0);
    for (uint64_t r0 : tw.support) s += Rational(1, static_cast<unsigned long>(oracle::phi(r0)));
    CHECK(tw.lambda_exact[0] == s);
    CHECK(tw.lambda1 == doctest::Approx(s.get_d()));
    for (std::size_t i = 0; i < tw.support.size(); ++i) {
        const uint64_t d = tw.support[i];
        const double ratio = std::abs(tw.lambda[i]) / tw.lambda1, ph = double(oracle::phi(d));
        CHECK(ratio <= double(d) * double(d) / (ph * ph) * (1 + 1e-12));
        CHECK((tw.lambda_exact[i] > 0 ? 1 : -1) == oracle::mobius(d));
    }
    std::vector<Rational> y(tw.support.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = Rational(long(i % 5 + 1), long(i % 3 + 1));
        y[i].canonicalize();
    }
    CHECK(tilde_y_from_lambda(tw, tilde_lambda_from_y(tw, y)) == y);
    CHECK(tilde_lambda_from_y(tw, tilde_y_from_lambda(tw, tw.lambda_exact)) == tw.lambda_exact);
}

TEST_CASE("mu plus") {
    TildeWeights trivial = build_tilde_weights(std::vector<uint64_t>{}, 100.0);
    CHECK(trivial.support == std::vector<uint64_t>{1});
    CHECK(trivial.lambda1 == 1.0);
    CHECK(mu_plus(1, trivial) == 1.0);

    TildeWeights one = build_tilde_weights(std::vector<uint64_t>{7}, 10.0);
    REQUIRE(one.support == std::vector<uint64_t>{1, 7});
    const double l1 = one.lambda1, lp = one.lambda_of(7);
    CHECK(mu_plus(7, one) == doctest::Approx((2 * l1 * lp + lp * lp) / (l1 * l1)));
}

TEST_CASE("Selberg form is at least 1 on S(xi)") {
    const std::vector<uint64_t> primes = {3, 7, 11, 19, 23};
    TildeWeights tw = build_tilde_weights(primes, 2000.0);
    for (uint64_t m = 1; m <= 100000; ++m) {
        bool killed = false;  // some sieve prime divides m exactly
        for (uint64_t p : primes) killed |= (m % p == 0 && (m / p) % p != 0);
        const double f = selberg_form(m, tw);
        REQUIRE(f == doctest::Approx(selberg_form_mu_plus(m, tw)).epsilon(1e-9));
        if (!killed) REQUIRE(f >= 1 - 1e-12);
        REQUIRE(f >= 0);
    }
}

TEST_CASE("sigma is 1 when p divides nothing") {
    SigmaInputs none;
    none.r = {1, 1};
    none.s = {1, 1};
    none.m = 0;
    none.sieve_prime = 11;
    for (SigmaVariant v : {SigmaVariant::S5T, SigmaVariant::S5main, SigmaVariant::S6}) {
        CHECK(sigma_local(v, 7, none) == 1);
        CHECK(sigma_bruteforce(v, 7, none) == 1);
    }
}

TEST_CASE("sigma case values equal the brute-force divisor sums, p <= 50") {
    uint64_t n = 0;
    for (uint64_t p = 2; p <= 50; ++p) {
        if (!oracle::is_prime(p)) continue;
        const uint64_t other = p == 3 ? 5 : 3;
        for (SigmaVariant v : {SigmaVariant::S5T, SigmaVariant::S5main, SigmaVariant::S6})
            for (unsigned K = 1; K <= 4; ++K)
                for (const SigmaInputs& in : sigma_case_configurations(v, p, K, other)) {
                    ++n;
                    REQUIRE(sigma_local(v, p, in) == sigma_bruteforce(v, p, in));
                }
    }
    MESSAGE(n << " configurations");
}

TEST_CASE("S5 main sum without the support condition differs") {
    // Taken exactly as displayed, with no coprimality between [d_i, e_i],
    // the brute-force sum departs from the case values somewhere.
    unsigned differ = 0, total = 0;
    for (uint64_t p : {3ull, 7ull, 11ull})
        for (unsigned K = 2; K <= 3; ++K)
            for (const SigmaInputs& in : sigma_case_configurations(SigmaVariant::S5main, p, K, p == 3 ? 5 : 3)) {
                ++total;
                REQUIRE(sigma_bruteforce(SigmaVariant::S5main, p, in, true) == sigma_local(SigmaVariant::S5main, p, in));
                differ += sigma_bruteforce(SigmaVariant::S5main, p, in, false) != sigma_local(SigmaVariant::S5main, p, in);
            }
    MESSAGE(differ << " of " << total << " configurations differ without the support condition");
    CHECK(differ > 0);
}

TEST_CASE("phi_omega_star") {
    CHECK(phi_omega_star(trial_factorize(7), 2) == doctest::Approx(7 * (1 - 3.0 / 7)));
    CHECK(phi_omega_star(trial_factorize(77), 2) == doctest::Approx(77 * (1 - 3.0 / 7) * (1 - 3.0 / 11)));
}
