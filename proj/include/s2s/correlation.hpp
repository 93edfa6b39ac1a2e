// Direct correlation sums of r2 and rho against their predicted main terms,
// and the six weighted sums S1..S6.
#pragma once

#include "s2s/params.hpp"
#include "s2s/sieve.hpp"
#include "s2s/tuples.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace s2s {

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    double empirical = 0;
    double predicted = 0;
    double ratio = 0;
    uint64_t terms = 0;
    int64_t runtime_ms = 0;
    // "asymptotic" compares against a main term, "bound" against an envelope.
    std::string kind = "asymptotic";
    std::vector<std::pair<std::string, double>> extra;
    std::string diagnostic;

    void set_ratio() { ratio = predicted != 0 ? empirical / predicted : 0.0; }
    double extra_value(const std::string& key) const;
};

// The sum over n <= x, n = alpha (r), n = 1 (4), d | n of r2(n). The
// checked entry point requires (alpha, r) = (d, r) = 1 with d, r odd squarefree.
ExperimentReport sum_r2_in_ap(uint64_t x, uint64_t r, uint64_t alpha, uint64_t d);
// Same sum with no gcd preconditions (used for partition checks).
uint64_t sum_r2_raw(uint64_t x, uint64_t r, uint64_t alpha, uint64_t d);

struct GammaInputs {
    int64_t h = 4;
    uint64_t c1 = 1, c2 = 1, r = 1;
    uint64_t truncation = 100000;
};

// Truncated t-sum; exactly 0 when (c1, c2) does not divide h.
double gamma_factor(const GammaInputs& in);
// Majorant of the omitted tail t > truncation.
double gamma_tail_bound(const GammaInputs& in);

ExperimentReport sum_r2_pair(uint64_t x, uint64_t r, uint64_t alpha, int64_t h, uint64_t c1, uint64_t c2,
                             uint64_t truncation = 100000);

// Slope protocol: (S(2x)/2x - S(x)/x) / log 2 against g3(r) g4(d) / (r d).
ExperimentReport sum_r2_squared(uint64_t x, uint64_t r, uint64_t alpha, uint64_t d);

struct SSumConfig {
    SieveParams params;
    std::vector<int64_t> b;          // tuple shifts, b[0] = 3
    std::size_t max_pool = 3;        // truncate the prime pool to this many primes
    unsigned m = 0;                  // S2, S4, S5
    unsigned m1 = 0, m2 = 1;         // S3
    uint64_t shift_b = 0;            // S6 uses l(n) = q n + shift_b; 0 picks the first admissible b
    bool auto_nu0 = true;            // pick the smallest valid residue
    uint64_t nu0 = 0;                // residue mod W when auto_nu0 is false
    uint64_t max_terms = 50000000;
};

struct SSumResult {
    std::array<ExperimentReport, 6> S;
    uint64_t nu0 = 0, nu1 = 0, shift_b = 0;
    std::vector<uint64_t> pool;
    double lambda1 = 0;
};

// All six sums over one loop of n in (x, 2x], n = 1 (4), n = nu0 (W).
// S6 restricts further to n = nu1 (q3^2 W^2) with nu1 = nu0 (W).
SSumResult empirical_S_all(const SSumConfig& cfg);
ExperimentReport empirical_S(int index, const SSumConfig& cfg);

// Smallest nu mod W with (l_i(nu), W) = 1 for every form; throws when none.
uint64_t find_nu0(const LinearFormTuple& t, const DerivedParams& d);

// C(t) from the case definition.
double hooley_C(uint64_t t);

struct HooleyProduct {
    double partial_sum = 0;
    double closed_product = 0;
};

HooleyProduct hooley_t_product(uint64_t h, uint64_t q1, uint64_t truncation);

}  // namespace s2s
