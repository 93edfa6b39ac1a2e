// Hooley's rho = r2 * t and the sums X, Z1, Z2.
#pragma once

#include "s2s/arith.hpp"

#include <cstdint>

namespace s2s {

struct RhoParams {
    double x = 1e6;
    double theta1 = 0.05;
    // v = x^theta1 unless overridden (v_override > 0).
    double v_override = 0;

    double v() const;
    double log_v() const;
    void check() const;
};

RhoParams rho_params_from_v(double v);

double t_of_n(const Factorization& f, const RhoParams& p);
double rho(const Factorization& f, const RhoParams& p);

struct XSumReport {
    double direct = 0;
    double predicted = 0;
    uint64_t terms = 0;
    bool hypothesis_ok = true;  // Q divides the product of primes <= (log log x)^3
};

XSumReport X_sum(double v, uint64_t Q);

struct ZSumReport {
    double Z1_direct = 0, Z1_predicted = 0;
    double Z2_direct = 0, Z2_predicted = 0;
    uint64_t support = 0;  // contributing a <= v
    bool hypothesis_ok = true;
};

inline constexpr uint64_t kDefaultZBudget = uint64_t(1) << 34;  // pair evaluations

ZSumReport Z_sums(double v, uint64_t Q, uint64_t pair_budget = kDefaultZBudget);

}  // namespace s2s
