// Primes, factorization, multiplicative functions and Euler-product constants.
#pragma once

#include "s2s/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace s2s {

struct Factorization {
    uint64_t n = 1;
    std::vector<std::pair<uint64_t, unsigned>> factors;  // sorted by prime

    bool squarefree() const;
    uint64_t radical() const;
};

// Plain Eratosthenes; primes <= n.
std::vector<uint64_t> primes_up_to(uint64_t n);

// Default entry budget for FactorSieve windows (4 bytes per entry).
inline constexpr uint64_t kDefaultSieveBudget = uint64_t(1) << 27;

class FactorSieve {
public:
    FactorSieve() = default;
    FactorSieve(uint64_t lo, uint64_t hi, uint64_t budget = kDefaultSieveBudget);

    uint64_t lo() const { return lo_; }
    uint64_t hi() const { return hi_; }
    bool contains(uint64_t n) const { return n >= lo_ && n < hi_; }

    // Smallest prime factor; n itself when n is prime. Requires n in range, n > 1.
    uint64_t spf(uint64_t n) const;
    bool is_prime(uint64_t n) const;

    Factorization factorize(uint64_t n) const;

    // Binary segment file: "S2SQ", u32 version, u64 lo, u64 hi, then one u32
    // per entry holding spf, or 0 when the entry is prime or below 2.
    void save(const std::string& path) const;
    static FactorSieve load(const std::string& path);

    const std::vector<uint32_t>& raw() const { return spf_; }

private:
    void build_base();

    uint64_t lo_ = 0, hi_ = 0;
    std::vector<uint32_t> spf_;
    std::vector<uint32_t> base_;  // primes up to sqrt(hi)
};

FactorSieve build_factor_sieve(uint64_t lo, uint64_t hi, uint64_t budget = kDefaultSieveBudget);
Factorization factorize(uint64_t n, const FactorSieve& sieve);
Factorization trial_factorize(uint64_t n);

// Sieve cache keyed by range under $S2S_CACHE_DIR (no-op when unset).
FactorSieve cached_factor_sieve(uint64_t lo, uint64_t hi);

int chi4(int64_t n);

enum class Mult { mu, phi, tau, g1, g2, g3, g4, g5_additive, g6_additive, g7, psi_g2 };

const char* mult_name(Mult m);
Mult mult_from_name(const std::string& s);

// Local factors at a prime power. Squarefree-only names reject e >= 2.
Rational local_factor(Mult m, uint64_t p, unsigned e);

// Exact value for the multiplicative names. The additive names carry log p
// and psi_g2 takes two arguments; those raise DomainError here.
Rational eval_multiplicative(Mult m, const Factorization& f);

// g5 / g6: sum over prime divisors of the local term (contains log p).
double additive_local(Mult m, uint64_t p);
double eval_additive(Mult m, const Factorization& f);

// Psi(u, t) = g2((u, t/(u,t))).
Rational psi_g2(uint64_t u, uint64_t t);

int mobius(const Factorization& f);
uint64_t euler_phi(const Factorization& f);

int64_t ramanujan_sum(uint64_t t, int64_t h);

struct EulerProductResult {
    double value = 0.0;
    uint64_t cutoff = 0;
    double tail_bound = 0.0;
    // Diagnostics for A: the two product forms.
    double form3 = 0.0;
    double form1 = 0.0;
};

EulerProductResult landau_ramanujan_A(uint64_t cutoff);
EulerProductResult constant_V(uint64_t cutoff);

// A at cutoff 1e6, memoized.
double landau_A();

// prod over p = 1 mod 4, p not dividing q1, of 1 + 1/(2p-1)^2.
double v_product_excluding(uint64_t q1, uint64_t cutoff = 1000000);

}  // namespace s2s
