#include "s2s/params.hpp"

#include "s2s/arith.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace s2s {

double SieveParams::log_x() const { return std::log(x); }

std::pair<uint64_t, uint64_t> split_q(uint64_t q) {
    uint64_t q1 = 1, q3 = 1;
    if (q == 0) return {q1, q3};
    for (auto& [p, e] : trial_factorize(q).factors) {
        if (p % 4 == 1) q1 *= p;
        if (p % 4 == 3) q3 *= p;
    }
    return {q1, q3};
}

void validate(const SieveParams& P) {
    if (P.q == 0) throw ValidationError("q must be positive");
    if (!P.allow_general_q) {
        if (P.q % 2 == 0) throw ValidationError("q must be odd (use --allow-general-q to override)");
        if (!trial_factorize(P.q).squarefree())
            throw ValidationError("q must be squarefree (use --allow-general-q to override)");
    }
    if (std::gcd(P.a_tilde1 % P.q, P.q) != 1 || std::gcd(P.a_tilde2 % P.q, P.q) != 1)
        throw ValidationError("a_tilde1 and a_tilde2 must be coprime to q");
    if (!(P.x > 1)) throw ValidationError("x must exceed 1");
    if (!(P.eta > 0)) throw ValidationError("eta must be positive");
    if (P.M == 0 || P.k == 0) throw ValidationError("M and k must be positive");
    if (P.M1 < 1 || P.M1 > P.M) throw ValidationError("M1 must satisfy 1 <= M1 <= M");
    if (!(P.theta1 > 0) || !(P.theta2 > 0)) throw ValidationError("theta1, theta2 must be positive");
    if (!(P.xi > 0)) throw ValidationError("xi must be positive");
    if (!P.exploratory) {
        if (!(P.theta1 + P.theta2 < 1.0 / 18.0))
            throw ValidationError("theta1 + theta2 must be below 1/18");
        if (!(P.xi < 1.0 / P.K())) throw ValidationError("xi must be below 1/K");
    }
    if (P.eta * std::sqrt(P.log_x()) < 3.0)
        throw ValidationError("D0 = eta*sqrt(log x) must be at least 3");
}

DerivedParams derived_params(const SieveParams& P) {
    validate(P);
    DerivedParams d;
    const double L = P.log_x();
    d.D0 = P.eta * std::sqrt(L);
    auto [q1, q3] = split_q(P.q);
    d.q1 = q1;
    d.q3 = q3;
    unsigned __int128 w = 1;
    bool fits = true;
    for (uint64_t p : primes_up_to(static_cast<uint64_t>(std::floor(d.D0)))) {
        if (p % 4 != 3 || P.q % p == 0) continue;
        d.W_primes.push_back(p);
        d.log_W += std::log(static_cast<double>(p));
        if (fits) {
            w *= p;
            if (w > UINT64_MAX) fits = false;
        }
    }
    if (fits) d.W = static_cast<uint64_t>(w);
    d.log_R = P.theta2 / 2 * L;
    d.R = std::exp(d.log_R);
    d.log_v = P.theta1 * L;
    d.v = std::exp(d.log_v);

    // q3 W is squarefree: both products run over its primes.
    std::vector<uint64_t> primes = d.W_primes;
    for (auto& [p, e] : trial_factorize(q3).factors) primes.push_back(p);
    for (uint64_t p : primes) {
        d.phi_ratio_q3W *= 1.0 - 1.0 / static_cast<double>(p);
        d.g1_q3W *= 1.0 + 1.0 / static_cast<double>(p);
    }
    d.A = landau_A();
    d.B = 2 * d.A / std::numbers::pi * d.phi_ratio_q3W * std::sqrt(d.log_R);
    return d;
}

}  // namespace s2s
