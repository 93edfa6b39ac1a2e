// Shifted linear-form tuples, the b-grid, admissibility, S(xi) and the
// positivity-witness checker.
#pragma once

#include "s2s/arith.hpp"
#include "s2s/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace s2s {

struct LinearFormTuple {
    uint64_t q = 1;
    std::vector<int64_t> a;
    std::vector<int64_t> b;
    unsigned M = 1, k = 1, M1 = 1;

    unsigned K() const { return static_cast<unsigned>(a.size()); }
    int64_t offset(unsigned i) const { return a[i] + static_cast<int64_t>(q) * b[i]; }
    uint64_t eval(unsigned i, uint64_t n) const { return q * n + static_cast<uint64_t>(offset(i)); }
    // Forms of bin j (0-based) are indices [j*k, (j+1)*k).
    unsigned bin_of(unsigned i) const { return i / k; }

    std::string to_json() const;
    static LinearFormTuple from_json(const std::string& s);
};

std::vector<int64_t> build_a_values(const SieveParams& params);

// Allowed values of each b_i, in increasing order.
std::vector<std::vector<int64_t>> b_coordinate_ranges(const SieveParams& params);

long double count_B(const SieveParams& params);

struct BEnumeration {
    std::vector<std::vector<int64_t>> tuples;
    long double total = 0;  // size of the full product set
    bool sampled = false;
    std::string diagnostic;
};

// Lexicographic when the grid has at most `limit` points, otherwise `limit`
// seeded draws returned in lexicographic order.
BEnumeration enumerate_B(const SieveParams& params, uint64_t limit, uint64_t seed = 0);

LinearFormTuple make_tuple(const SieveParams& params, const std::vector<int64_t>& b);

bool is_P_admissible(const LinearFormTuple& t);

bool in_S_xi(uint64_t n_value, const SieveParams& params, const FactorSieve& sieve);

struct WitnessReport {
    uint64_t n = 0;
    bool cond_i = false;
    bool cond_ii = false;
    bool cond_iii = false;
    bool consecutive = false;
    std::vector<uint64_t> E_members;  // values l_i(n) in E, ascending
    uint64_t window_lo = 0, window_hi = 0;  // qn + 1 .. qn + floor(eta sqrt(log x))

    bool all() const { return cond_i && cond_ii && cond_iii; }
};

WitnessReport verify_witness(uint64_t n, const LinearFormTuple& t, const SieveParams& params,
                             const FactorSieve& sieve);

// Deterministic generator for sampling: splitmix64 with unbiased bounded draws.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : s_(seed) {}
    uint64_t next();
    uint64_t below(uint64_t bound);  // uniform in [0, bound)

private:
    uint64_t s_;
};

}  // namespace s2s
