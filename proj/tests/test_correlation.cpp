#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "s2s/correlation.hpp"

using namespace s2s;

namespace {

double gamma_at(int64_t h, uint64_t c1, uint64_t c2, uint64_t r, uint64_t T = 200000) {
    return gamma_factor(GammaInputs{h, c1, c2, r, T});
}

SSumConfig small_config() {
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
    return c;
}

}  // namespace

TEST_CASE("r2 in progressions: bands") {
    ExperimentReport a = sum_r2_in_ap(1000000, 1, 0, 1);
    CHECK(a.ratio >= 0.99);
    CHECK(a.ratio <= 1.01);
    ExperimentReport b = sum_r2_in_ap(1000000, 5, 1, 13);
    CHECK(b.ratio >= 0.9);
    CHECK(b.ratio <= 1.1);
    CHECK(sum_r2_in_ap(1000, 1, 0, 3).predicted / sum_r2_in_ap(1000, 1, 0, 1).predicted == doctest::Approx(1.0 / 9));
    CHECK_THROWS_AS(sum_r2_in_ap(1000, 5, 0, 1), DomainError);
    CHECK_THROWS(sum_r2_in_ap(1000, 1, 0, 9));
}

TEST_CASE("r2 in progressions: residue classes partition the total") {
    const uint64_t x = 200000;
    for (uint64_t r : {3ull, 5ull, 15ull}) {
        uint64_t s = 0;
        for (uint64_t alpha = 0; alpha < r; ++alpha) {
            const uint64_t part = sum_r2_raw(x, r, alpha, 1);
            if (std::gcd(alpha, r) == 1) CHECK(part == uint64_t(sum_r2_in_ap(x, r, alpha, 1).empirical));
            s += part;
        }
        CHECK(s == sum_r2_raw(x, 1, 0, 1));
    }
    // Against the lattice count directly.
    uint64_t direct = 0;
    for (uint64_t n = 1; n <= 20000; n += 4)
        if (n % 3 == 2 && n % 13 == 0) direct += oracle::lattice_r2(n);
    CHECK(sum_r2_raw(20000, 3, 2, 13) == direct);
}

TEST_CASE("Gamma zero case and truncation") {
    CHECK(gamma_at(4, 7, 7, 1) == 0.0);
    CHECK(gamma_at(4, 3, 15, 1) == 0.0);
    CHECK(gamma_tail_bound({4, 7, 7, 1, 1000}) == 0.0);
    for (GammaInputs g : {GammaInputs{4, 1, 1, 1, 1000}, GammaInputs{12, 3, 1, 5, 2000}, GammaInputs{20, 5, 1, 1, 500}}) {
        GammaInputs g2 = g;
        g2.truncation = 2 * g.truncation;
        CHECK(std::abs(gamma_factor(g) - gamma_factor(g2)) <= gamma_tail_bound(g));
    }
    CHECK_THROWS_AS(gamma_at(4, 1, 1, 1, 0), DomainError);
}

TEST_CASE("Gamma is multiplicative over the t-sum Euler factors") {
    // Excluding coprime sets of primes through r.
    CHECK(gamma_at(4, 1, 1, 15) * gamma_at(4, 1, 1, 1) == doctest::Approx(gamma_at(4, 1, 1, 3) * gamma_at(4, 1, 1, 5)).epsilon(1e-4));
    CHECK(gamma_at(4, 1, 1, 77) * gamma_at(4, 1, 1, 1) == doctest::Approx(gamma_at(4, 1, 1, 7) * gamma_at(4, 1, 1, 11)).epsilon(1e-4));
    // Odd parts of h enter prime by prime.
    CHECK(gamma_at(180, 1, 1, 1) * gamma_at(4, 1, 1, 1) == doctest::Approx(gamma_at(36, 1, 1, 1) * gamma_at(20, 1, 1, 1)).epsilon(1e-4));
}

TEST_CASE("pair correlation") {
    ExperimentReport z = sum_r2_pair(20000, 1, 1, 4, 3, 15);
    CHECK(z.empirical == 0.0);
    CHECK(z.extra_value("gamma") == 0.0);
    ExperimentReport a = sum_r2_pair(1000000, 1, 1, 4, 1, 1);
    CHECK(a.ratio >= 0.9);
    CHECK(a.ratio <= 1.1);
    CHECK_THROWS_AS(sum_r2_pair(1000, 1, 1, 0, 1, 1), DomainError);
    CHECK_THROWS_AS(sum_r2_pair(1000, 1, 1, 6, 1, 1), DomainError);
    // Empirical side against the lattice oracle.
    uint64_t direct = 0;
    for (uint64_t n = 1; n <= 5000; n += 4)
        if (n % 5 == 0) direct += oracle::lattice_r2(n) * oracle::lattice_r2(n + 8);
    CHECK(sum_r2_pair(5000, 1, 1, 8, 5, 1).empirical == double(direct));
}

TEST_CASE("second moment slope") {
    ExperimentReport s = sum_r2_squared(1000000, 1, 0, 1);
    MESSAGE("slope " << s.empirical << " display " << s.predicted);
    CHECK(s.extra_value("ratio_derived") >= 0.8);
    CHECK(s.extra_value("ratio_derived") <= 1.2);
    CHECK(s.ratio == doctest::Approx(2.0).epsilon(0.2));
    const double base = sum_r2_squared(10000, 1, 0, 1).predicted;
    CHECK(sum_r2_squared(10000, 1, 0, 5).predicted / base == doctest::Approx(86.0 / 150));
    CHECK(sum_r2_squared(10000, 3, 1, 1).predicted / base == doctest::Approx(4.0 / 9));
}

TEST_CASE("S1 with an empty pool counts qualifying n") {
    SSumConfig c = small_config();
    c.max_pool = 0;
    SSumResult r = empirical_S_all(c);
    CHECK(r.pool.empty());
    CHECK(r.lambda1 == 1.0);
    const double count = r.S[0].extra_value("count");
    CHECK(count > 0);
    CHECK(r.S[0].empirical == count * r.lambda1 * r.lambda1);
    // The count by hand: n in (x, 2x], n = 1 (4), n = nu0 (W).
    const uint64_t W = 21;
    uint64_t n1 = 0;
    for (uint64_t n = 1000001; n <= 2000000; ++n) n1 += n % 4 == 1 && n % W == r.nu0;
    CHECK(count == double(n1));
}

TEST_CASE("S sums on a 2-prime pool") {
    SSumConfig c = small_config();
    c.max_pool = 2;
    SSumResult r = empirical_S_all(c);
    CHECK(r.pool == std::vector<uint64_t>{11, 19});
    for (auto& s : r.S) CHECK(std::isfinite(s.empirical));
    CHECK(r.S[2].kind == "bound");
    CHECK(r.S[2].empirical <= 1.25 * r.S[2].predicted);
    MESSAGE("S2/S1 = " << r.S[1].empirical / r.S[0].empirical);
    CHECK(r.S[1].empirical > 0);
    CHECK(r.S[0].empirical > 0);
    CHECK(empirical_S(3, c).empirical == r.S[2].empirical);
    CHECK_THROWS_AS(empirical_S(7, c), ValidationError);
}

TEST_CASE("Hooley C(t) against its case definition, t <= 1e4") {
    for (uint64_t t = 1; t <= 10000; ++t) {
        double c = 1;
        for (auto& [p, e] : oracle::factor(t))
            if (p % 4 == 1) c = e >= 2 ? c / (2.0 - 1.0 / double(p)) : 0.0;
        REQUIRE(hooley_C(t) == doctest::Approx(c).epsilon(1e-14));
    }
    CHECK(hooley_C(25) == doctest::Approx(5.0 / 9));
    CHECK(hooley_C(5) == 0.0);
    CHECK(hooley_C(3) == 1.0);
}

TEST_CASE("Hooley product") {
    HooleyProduct one = hooley_t_product(1, 1, 10000);
    CHECK(one.closed_product == 1.0);
    CHECK(one.partial_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hooley_t_product(25, 1, 10).closed_product == doctest::Approx(1 + (1 - 0.2 - 0.04) / 81));
    for (uint64_t h : {1ull, 4ull, 25ull, 100ull})
        for (uint64_t q1 : {1ull, 5ull}) {
            HooleyProduct a = hooley_t_product(h, q1, 10000), b = hooley_t_product(h, q1, 200000);
            CHECK(std::abs(b.partial_sum - b.closed_product) < 1e-6);
            CHECK(std::abs(b.partial_sum - b.closed_product) <= std::abs(a.partial_sum - a.closed_product) + 1e-15);
        }
    // The partial sum is the t-sum of c_t(h) C(t)^2 / t^2 over t built from primes 1 mod 4.
    double s = 0;
    for (uint64_t t = 1; t <= 5000; ++t) {
        bool ok = true;
        for (auto& [p, e] : oracle::factor(t)) ok &= p % 4 == 1;
        if (ok) s += double(ramanujan_sum(t, 100)) * hooley_C(t) * hooley_C(t) / (double(t) * double(t));
    }
    CHECK(hooley_t_product(100, 1, 5000).partial_sum == doctest::Approx(s).epsilon(1e-12));
    CHECK_THROWS_AS(hooley_t_product(0, 1, 10), DomainError);
}
