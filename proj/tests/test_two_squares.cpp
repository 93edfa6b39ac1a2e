#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "s2s/two_squares.hpp"

using namespace s2s;

TEST_CASE("members of E in [1, 11)") {
    for (EMethod m : {EMethod::lattice, EMethod::factorization}) {
        TwoSquaresRange r = enumerate_E(1, 11, m);
        CHECK(r.members() == std::vector<uint64_t>{1, 2, 4, 5, 8, 9, 10});
    }
    CHECK_FALSE(in_E(trial_factorize(3)));
    CHECK(in_E(trial_factorize(9)));
}

TEST_CASE("r2 examples") {
    CHECK(r2(trial_factorize(1)) == 4);
    CHECK(r2(trial_factorize(25)) == 12);
    CHECK(r2(trial_factorize(3)) == 0);
}

TEST_CASE("r2 formula against lattice counting, n <= 1e5") {
    FactorSieve s = build_factor_sieve(1, 100001);
    TwoSquaresRange e = enumerate_E(1, 100001);
    for (uint64_t n = 1; n <= 100000; ++n) {
        Factorization f = s.factorize(n);
        const uint64_t lat = oracle::lattice_r2(n);
        REQUIRE(r2(f) == lat);
        REQUIRE(r2_divisor_sum(f) == static_cast<int64_t>(lat));
        REQUIRE((lat > 0) == e.contains(n));
        REQUIRE((lat > 0) == in_E(f));
    }
}

TEST_CASE("lattice and factorization methods agree") {
    SUBCASE("[1, 1e6]") {
        TwoSquaresRange a = enumerate_E(1, 1000001, EMethod::lattice);
        TwoSquaresRange b = enumerate_E(1, 1000001, EMethod::factorization);
        CHECK(a.same_membership(b));
    }
    SUBCASE("[1e9, 1e9 + 1e5]") {
        const uint64_t lo = 1000000000, hi = lo + 100001;
        TwoSquaresRange a = enumerate_E(lo, hi, EMethod::lattice);
        TwoSquaresRange b = enumerate_E(lo, hi, EMethod::factorization);
        CHECK(a.same_membership(b));
        std::vector<bool> o = oracle::lattice_mark(lo, hi);
        for (uint64_t n = lo; n < hi; ++n) REQUIRE(a.contains(n) == o[n - lo]);
    }
}

TEST_CASE("count_N") {
    CHECK(count_N(10) == 7);
    CHECK(count_N(1) == 1);
    CHECK(count_N(2) == 2);
}

TEST_CASE("E-admissible classes") {
    CHECK_FALSE(is_E_admissible(3, 9));
    CHECK(is_E_admissible(0, 9));
    CHECK_FALSE(is_E_admissible(3, 4));
    CHECK(is_E_admissible(1, 4));
    // A class is admissible exactly when it meets E.
    const uint64_t Q = 60, N = 400 * Q * Q;
    std::vector<bool> e = oracle::lattice_mark(0, N);
    for (uint64_t q = 1; q <= Q; ++q)
        for (uint64_t a = 0; a < q; ++a) {
            bool seen = false;
            for (uint64_t n = a == 0 ? q : a; n < N && !seen; n += q) seen = e[n];
            INFO("a=" << a << " q=" << q);
            REQUIRE(seen == is_E_admissible(a, q));
        }
}

TEST_CASE("pattern counts") {
    CHECK(count_patterns(10, {1, {0}}) == 7);
    CHECK(count_patterns(10, {4, {1, 2}}) == 2);  // (1,2) and (9,10)
    CHECK(count_patterns(1000000, {5, {3}}) > 0);
    CHECK_THROWS_AS(count_patterns(10, {4, {4}}), ValidationError);
}

TEST_CASE("pattern counts against a direct scan of E") {
    const uint64_t x = 200000;
    std::vector<bool> e = oracle::lattice_mark(0, x + 1000);
    std::vector<uint64_t> seq;
    for (uint64_t n = 1; n < e.size(); ++n)
        if (e[n]) seq.push_back(n);
    for (uint64_t q : {3ull, 5ull, 4ull}) {
        PatternTable t = pattern_distribution(x, q, 3);
        std::vector<uint64_t> direct(q * q * q, 0);
        for (std::size_t i = 0; seq[i] <= x; ++i) direct[(seq[i] % q) * q * q + (seq[i + 1] % q) * q + seq[i + 2] % q]++;
        CHECK(t.counts == direct);
    }
}

TEST_CASE("distribution partitions N(x)") {
    const uint64_t x = 1000000, N = count_N(x);
    for (uint64_t q : {1ull, 3ull, 5ull, 7ull})
        for (unsigned M : {1u, 2u}) {
            PatternTable t = pattern_distribution(x, q, M);
            uint64_t s = 0;
            for (uint64_t c : t.counts) s += c;
            CHECK(s == N);
        }
    PatternTable one = pattern_distribution(x, 1, 2);
    CHECK(one.counts.size() == 1);
    CHECK(one.counts[0] == N);
}

TEST_CASE("every reduced class mod 5 occurs below 1e8") {
    PatternTable t = pattern_distribution(100000000, 5, 1);
    for (uint64_t a = 1; a < 5; ++a) CHECK(t.count_of({a}) > 0);
}

TEST_CASE("CSV layout") {
    PatternTable t = pattern_distribution(100, 3, 1);
    std::string csv = pattern_csv(t);
    CHECK(csv.rfind("q,pattern,count,x\n", 0) == 0);
    CHECK(pattern_label({1, 1, 4}) == "1-1-4");
}

TEST_CASE("Landau asymptotic band with slow convergence") {
    const double A = landau_A();
    double prev_gap = 1e9;
    std::vector<uint64_t> xs = {1000000, 10000000, 100000000};
    for (uint64_t x : xs) {
        double r = double(count_N(x)) * std::sqrt(std::log(double(x))) / (A * double(x));
        CHECK(r >= 0.9);
        CHECK(r <= 1.3);
        if (x == xs.front() || x == xs.back()) {
            CHECK(std::abs(r - 1) < prev_gap);
            prev_gap = std::abs(r - 1);
        }
    }
}
