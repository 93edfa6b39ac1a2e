// Multi-dimensional Selberg weights over D_K, the one-dimensional tilde
// weights, local factors sigma_p and the functionals of F.
#pragma once

#include "s2s/arith.hpp"
#include "s2s/params.hpp"
#include "s2s/tuples.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace s2s {

using DTuple = std::vector<uint64_t>;

struct DTupleHash {
    std::size_t operator()(const DTuple& d) const {
        std::size_t h = 1469598103934665603ULL;
        for (uint64_t v : d) h = (h ^ std::hash<uint64_t>{}(v)) * 1099511628211ULL;
        return h;
    }
};

inline constexpr uint64_t kDefaultTupleCap = 10000000;

// Primes p = 3 mod 4 with D0 < p <= R and p not dividing q3 W, ascending.
// max_primes truncates to the smallest ones.
std::vector<uint64_t> prime_pool(const SieveParams& params, const DerivedParams& derived,
                                 std::size_t max_primes = std::numeric_limits<std::size_t>::max());

struct DKSpace {
    unsigned K = 1;
    std::vector<uint64_t> pool;
    double log_R = 0;
    std::vector<DTuple> tuples;  // tuples[0] is (1,...,1)
    std::unordered_map<DTuple, std::size_t, DTupleHash> index;

    std::size_t find(const DTuple& d) const;  // npos when absent
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Depth-first over the pool with product cap R = exp(log_R), each prime
// unused or assigned to one coordinate.
DKSpace build_DK_space(unsigned K, const std::vector<uint64_t>& pool, double log_R,
                       uint64_t cap = kDefaultTupleCap);

double g_of_t(double t);
double F_eval(const std::vector<double>& t);
double y_of(const DTuple& r, double log_R);

struct WeightTable {
    DKSpace space;
    bool exact = false;
    std::vector<double> y, lambda;
    std::vector<Rational> y_exact, lambda_exact;

    double lambda_of(const DTuple& d) const;
    double log_R() const { return space.log_R; }
    double max_abs_lambda() const;
    std::string to_csv() const;
};

inline constexpr std::size_t kExactPoolLimit = 8;

// y from F; lambda by the inner sum over r in D_K with d | r. Exact rationals
// when the pool has at most kExactPoolLimit primes.
WeightTable build_weight_table(const DKSpace& space);

// lambda_d = (prod mu(d_i) d_i) sum_{d|r} y_r / phi(r)
std::vector<Rational> lambda_from_y(const DKSpace& space, const std::vector<Rational>& y);
std::vector<double> lambda_from_y(const DKSpace& space, const std::vector<double>& y);
// y_r = (prod mu(r_i) phi(r_i)) sum_{r|d} lambda_d / d
std::vector<Rational> y_from_lambda(const DKSpace& space, const std::vector<Rational>& lambda);

// (sum over d in D_K with d_i | l_i(n) of lambda_d)^2.
double w_n(uint64_t n, const LinearFormTuple& t, const WeightTable& table);
// The inner sum before squaring.
double w_n_root(uint64_t n, const LinearFormTuple& t, const WeightTable& table);

enum class LVariant { plain, single, dbl };

struct QuadratureResult {
    double value = 0;
    double achieved_tol = 0;
    unsigned nodes = 0;  // per axis
};

QuadratureResult functional_L(unsigned K, LVariant variant, double tol = 1e-10);
double functional_L_closed(unsigned K, LVariant variant);

struct PerturbationReport {
    bool applicable = false;
    int part = 0;  // 1 or 2
    double A = 1;
    double y_r = 0, y_s = 0;
    double measured_C = 0;  // |y_s - y_r| / (K log A / log R * weight)
};

PerturbationReport y_perturbation_check(const DTuple& r, const DTuple& s, double log_R);

struct DecouplingReport {
    double coupled = 0;    // over D_K
    double decoupled = 0;  // K-th power of the one-dimensional sum
    double relative_gap = 0;
};

DecouplingReport decoupling_check(unsigned K, const std::vector<uint64_t>& pool, double log_R);

struct LambdaBoundReport {
    double max_abs_lambda = 0;
    double scale = 0;  // (log R / log D0)^(K/2)
    double measured_C = 0;
};

LambdaBoundReport lambda_bound(const WeightTable& table, double log_D0);

// One-dimensional weights for the S6 upper-bound sieve.
struct TildeWeights {
    double xi = 0;
    double X = 0;  // x^xi
    std::vector<uint64_t> primes;
    std::vector<uint64_t> support;  // ascending, support[0] = 1
    std::unordered_map<uint64_t, std::size_t> index;
    std::vector<double> lambda;
    std::vector<Rational> lambda_exact;
    bool exact = false;
    double lambda1 = 0;

    double lambda_of(uint64_t d0) const;
};

inline constexpr std::size_t kTildeExactLimit = 6;
inline constexpr uint64_t kDefaultTildeCap = 5000000;

TildeWeights build_tilde_weights(const SieveParams& params, uint64_t cap = kDefaultTildeCap);
TildeWeights build_tilde_weights(const std::vector<uint64_t>& primes, double X, uint64_t cap = kDefaultTildeCap);

std::vector<Rational> tilde_lambda_from_y(const TildeWeights& tw, const std::vector<Rational>& y);
std::vector<Rational> tilde_y_from_lambda(const TildeWeights& tw, const std::vector<Rational>& lambda);

double mu_plus(uint64_t f, const TildeWeights& tw);

// (sum of lambda~_d0 over d0 whose primes all divide m exactly)^2 / lambda~_1^2.
double selberg_form(uint64_t m, const TildeWeights& tw);
// The same quantity as the sum of mu+(f) over the lcm closure.
double selberg_form_mu_plus(uint64_t m, const TildeWeights& tw);

enum class SigmaVariant { S5T, S5main, S6 };

struct SigmaInputs {
    std::vector<uint64_t> r, s;  // K-vectors (u, v for S5T)
    uint64_t r0 = 1, s0 = 1;     // S6 only
    unsigned m = 0;              // S5main only
    uint64_t sieve_prime = 0;    // S5main only: the prime p of the outer sum
};

// Case value of the local factor at p.
Rational sigma_local(SigmaVariant variant, uint64_t p, const SigmaInputs& in);

// The defining divisor-tuple sum restricted to p. The S5main and S6 sums
// carry the support condition that no prime divides two distinct forms,
// i.e. [d_i, e_i] pairwise coprime; with respect_support = false the S5main
// sum is taken exactly as displayed, without that condition.
Rational sigma_bruteforce(SigmaVariant variant, uint64_t p, const SigmaInputs& in, bool respect_support = true);

// Every placement of p in r and in s (absent or one slot each), for K forms;
// S5main also runs over m and over sieve_prime in {p, other}. `other` is a
// prime distinct from p, also written into one coordinate so the local
// factor is seen to ignore it.
std::vector<SigmaInputs> sigma_case_configurations(SigmaVariant variant, uint64_t p, unsigned K, uint64_t other);

double phi_omega_star(const Factorization& f, unsigned K);

}  // namespace s2s
