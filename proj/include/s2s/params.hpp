// The sieve parameter bundle and the quantities derived from it.
#pragma once

#include "s2s/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace s2s {

struct SieveParams {
    double x = 1e6;
    uint64_t q = 1;
    uint64_t a_tilde1 = 1;
    uint64_t a_tilde2 = 1;
    double theta1 = 0.02;
    double theta2 = 0.03;
    double eta = 1.0;
    unsigned M = 1;
    unsigned M1 = 1;
    unsigned k = 1;
    double xi = 0.01;

    // Loosen the theorem-mode checks. allow_general_q admits even or
    // non-squarefree q; exploratory drops the theta and xi constraints so
    // desk-scale experiments can reach nontrivial pools.
    bool allow_general_q = false;
    bool exploratory = false;

    unsigned K() const { return M * k; }
    double log_x() const;
};

struct DerivedParams {
    double D0 = 0;
    std::vector<uint64_t> W_primes;  // p <= D0, p = 3 mod 4, p not dividing q
    std::optional<uint64_t> W;       // present when it fits in 64 bits
    double log_W = 0;
    double R = 0;
    double log_R = 0;  // (theta2 / 2) log x
    double v = 0;
    double log_v = 0;
    uint64_t q1 = 1, q3 = 1;
    double phi_ratio_q3W = 1;  // phi(q3 W) / (q3 W)
    double g1_q3W = 1;
    double A = 0;
    double B = 0;
};

// Validates params (see SieveParams flags) and computes D0, W, R, v, q1, q3, B.
DerivedParams derived_params(const SieveParams& params);

// Validation only; throws ValidationError.
void validate(const SieveParams& params);

// q1 / q3: the products of the prime factors of q that are 1 / 3 mod 4.
std::pair<uint64_t, uint64_t> split_q(uint64_t q);

}  // namespace s2s
