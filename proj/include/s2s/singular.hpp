// Local densities of shifted tuples, Gallagher-average combinatorics and the
// admissible-tuple count.
#pragma once

#include "s2s/correlation.hpp"
#include "s2s/params.hpp"
#include "s2s/tuples.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace s2s {

struct LocalDensity {
    uint64_t p = 0;
    unsigned Np = 0;         // classes nu mod p with p | l_i(nu) or p | q nu + b
    unsigned Np2_tilde = 0;  // classes nu mod p^2 with p | l_i(nu), or p || q nu + b
    unsigned E = 0;          // p Np - Np2_tilde
};

// Both counts by direct scan. For p not dividing q, E must be 0 or 1 and a
// NumericalError is thrown otherwise.
LocalDensity local_density(const LinearFormTuple& t, uint64_t b, uint64_t p);

BigInt binomial(uint64_t n, uint64_t k);
// Surjections {1..K} -> {1..N} by inclusion-exclusion.
BigInt surjections(unsigned K, unsigned N);

// a(p, N) for N = 1..K+1 (entry N-1).
std::vector<Rational> gallagher_coefficients(uint64_t p, unsigned K);

// How the local weight of a class count N is taken inside A(r).
//   free_tuples: C(p, N) sigma(K+1, N), all K+1 values b_1..b_K, b free;
//   anchored:    C(p-1, N-1) (sigma(K, N) + sigma(K, N-1)), b_1 pinned;
//   literal:     C(p, N) sigma(K, N), exactly as the A(r) display reads.
// The first two vanish for r > 1; the literal form does not.
enum class AConvention { free_tuples, anchored, literal };

const char* a_convention_name(AConvention c);
AConvention a_convention_from_name(const std::string& s);

// Local weight for one class count.
BigInt class_weight(uint64_t p, unsigned K, unsigned N, AConvention c);

// sum_N a(p, N) class_weight(p, K, N).
Rational A_local(uint64_t p, unsigned K, AConvention c = AConvention::free_tuples);
// Product of the local sums over p | r; r squarefree with primes > K+1.
Rational A_r_identity(uint64_t r, unsigned K, AConvention c = AConvention::free_tuples);
// The same quantity expanded as the sum over N-vectors (small omega(r) only).
Rational A_r_vector_sum(uint64_t r, unsigned K, AConvention c = AConvention::free_tuples);

// CSV with header r,K,value.
std::string A_r_csv(const std::vector<uint64_t>& rs, unsigned K, AConvention c = AConvention::free_tuples);

struct SingularBoundPair {
    double lhs = 1;  // prod over p | W of (1 - Np2~/p^2) / (1 - 1/p)^(K+1)
    double rhs = 1;  // prod over p | W, p > K+1 of (1 - Np/p) / (1 - 1/p)^(K+1)
};

SingularBoundPair singular_bound_pair(const LinearFormTuple& t, uint64_t b, const std::vector<uint64_t>& W_primes);

ExperimentReport gallagher_average(const SieveParams& params, uint64_t sample_limit, uint64_t seed = 0);

ExperimentReport count_admissible_tuples(const SieveParams& params, uint64_t sample_limit, uint64_t seed = 0);

}  // namespace s2s
