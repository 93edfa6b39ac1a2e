#include "verify.hpp"

#include "s2s/arith.hpp"
#include "s2s/correlation.hpp"
#include "s2s/report.hpp"
#include "s2s/rho.hpp"
#include "s2s/sieve.hpp"
#include "s2s/singular.hpp"
#include "s2s/tuples.hpp"
#include "s2s/two_squares.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace s2s {
namespace {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

struct Check {
    std::string name;
    std::function<CheckResult()> body;
};

struct Ctx {
    bool quick = false;
    bool corrupt_weights = false;
};

CheckResult ok(bool pass, std::string detail = "") { return {pass, std::move(detail)}; }

std::string num(double v) { return number_json(v).dump(); }

// ---- arith ----

std::vector<Check> arith_checks(const Ctx& c) {
    return {
        {"smallest_prime_factor",
         [c] {
             const uint64_t N = c.quick ? 100000 : 1000000;
             FactorSieve s = build_factor_sieve(1, N);
             for (uint64_t n = 2; n < N; ++n) {
                 uint64_t t = trial_factorize(n).factors.front().first;
                 if (s.spf(n) != t) return ok(false, "n=" + std::to_string(n));
             }
             return ok(true, "n<" + std::to_string(N));
         }},
        {"multiplicativity",
         [] {
             for (uint64_t m = 1; m <= 200; ++m)
                 for (uint64_t n = 1; n <= 200; ++n) {
                     if (std::gcd(m, n) != 1) continue;
                     Factorization fm = trial_factorize(m), fn = trial_factorize(n), f = trial_factorize(m * n);
                     if (mobius(f) != mobius(fm) * mobius(fn) || euler_phi(f) != euler_phi(fm) * euler_phi(fn))
                         return ok(false, std::to_string(m) + "*" + std::to_string(n));
                     if (!f.squarefree() || (m * n) % 2 == 0) continue;
                     for (Mult g : {Mult::g1, Mult::g2, Mult::g3, Mult::g4})
                         if (eval_multiplicative(g, f) != eval_multiplicative(g, fm) * eval_multiplicative(g, fn))
                             return ok(false, std::string(mult_name(g)));
                 }
             return ok(true);
         }},
        {"ramanujan_sum",
         [] {
             for (uint64_t t = 1; t <= 40; ++t)
                 for (int64_t h = -12; h <= 40; ++h) {
                     double s = 0;
                     for (uint64_t a = 1; a <= t; ++a)
                         if (std::gcd(a, t) == 1)
                             s += std::cos(2 * std::numbers::pi * double(a) * double(h) / double(t));
                     if (std::llround(s) != ramanujan_sum(t, h))
                         return ok(false, "t=" + std::to_string(t) + " h=" + std::to_string(h));
                 }
             return ok(true);
         }},
        {"constant_V_band",
         [] {
             double v = constant_V(1000000).value;
             return ok(v >= 1.015 && v <= 1.017, "V=" + num(v));
         }},
        {"landau_A_forms",
         [c] {
             EulerProductResult a = landau_ramanujan_A(c.quick ? 100000 : 1000000);
             double gap = std::abs(a.form1 - a.form3);
             return ok(gap < 1e-4, "gap=" + num(gap));
         }},
    };
}

// ---- two-squares ----

std::vector<Check> two_squares_checks(const Ctx& c) {
    return {
        {"r2_lattice",
         [c] {
             const uint64_t N = c.quick ? 10000 : 100000;
             std::vector<uint64_t> cnt(N + 1, 0);
             const int64_t s = static_cast<int64_t>(std::sqrt(double(N))) + 1;
             for (int64_t x = -s; x <= s; ++x)
                 for (int64_t y = -s; y <= s; ++y) {
                     uint64_t n = uint64_t(x * x + y * y);
                     if (n >= 1 && n <= N) ++cnt[n];
                 }
             for (uint64_t n = 1; n <= N; ++n)
                 if (r2(trial_factorize(n)) != cnt[n]) return ok(false, "n=" + std::to_string(n));
             return ok(true, "n<=" + std::to_string(N));
         }},
        {"enumeration_methods",
         [c] {
             const uint64_t N = c.quick ? 100000 : 1000000;
             bool same = enumerate_E(1, N + 1, EMethod::lattice)
                             .same_membership(enumerate_E(1, N + 1, EMethod::factorization));
             return ok(same, "[1," + std::to_string(N) + "]");
         }},
        {"membership_vs_r2",
         [] {
             TwoSquaresRange e = enumerate_E(1, 20001);
             for (uint64_t n = 1; n <= 20000; ++n)
                 if (e.contains(n) != (r2(trial_factorize(n)) > 0)) return ok(false, "n=" + std::to_string(n));
             return ok(true);
         }},
        {"E_admissible_classes",
         [] {
             const uint64_t Q = 60;
             TwoSquaresRange e = enumerate_E(1, 200 * Q * Q);
             for (uint64_t q = 1; q <= Q; ++q)
                 for (uint64_t a = 0; a < q; ++a) {
                     bool seen = false;
                     for (uint64_t n = a == 0 ? q : a; n < 200 * Q * Q && !seen; n += q) seen = e.contains(n);
                     if (seen != is_E_admissible(a, q))
                         return ok(false, "a=" + std::to_string(a) + " q=" + std::to_string(q));
                 }
             return ok(true);
         }},
    };
}

// ---- rho ----

std::vector<Check> rho_checks(const Ctx& c) {
    return {
        {"t_small_values",
         [] {
             RhoParams p = rho_params_from_v(25);
             double t1 = t_of_n(trial_factorize(1), p), t7 = t_of_n(trial_factorize(7), p);
             return ok(t1 == 1 && t7 == 1, "t(1)=" + num(t1) + " t(7)=" + num(t7));
         }},
        {"rho_nonnegative",
         [] {
             RhoParams p = rho_params_from_v(1000);
             for (uint64_t n = 1; n <= 20000; ++n)
                 if (rho(trial_factorize(n), p) < -1e-12) return ok(false, "n=" + std::to_string(n));
             return ok(true);
         }},
        {"X_sum_band",
         [c] {
             XSumReport x = X_sum(c.quick ? 1e4 : 1e5, 1);
             double r = x.direct / x.predicted;
             return ok(r > 0.8 && r < 1.2, "ratio=" + num(r));
         }},
    };
}

// ---- weights ----

std::vector<Check> weights_checks(const Ctx& c) {
    return {
        {"lambda_y_round_trip",
         [c] {
             DKSpace sp = build_DK_space(2, {7, 11, 19}, std::log(1e4));
             WeightTable t = build_weight_table(sp);
             if (!t.exact) return ok(false, "table not exact");
             std::vector<Rational> lam = t.lambda_exact;
             if (c.corrupt_weights && lam.size() > 1) lam[1] += Rational(1, 7);
             bool back = y_from_lambda(sp, lam) == t.y_exact;
             bool fwd = lambda_from_y(sp, t.y_exact) == lam;
             return ok(back && fwd, "size=" + std::to_string(sp.tuples.size()));
         }},
        {"tilde_round_trip",
         [] {
             TildeWeights tw = build_tilde_weights(std::vector<uint64_t>{3, 7, 11, 19, 23, 31}, 2e4);
             std::vector<Rational> y = tilde_y_from_lambda(tw, tw.lambda_exact);
             return ok(tw.exact && tilde_lambda_from_y(tw, y) == tw.lambda_exact,
                       "support=" + std::to_string(tw.support.size()));
         }},
        {"functionals_closed_form",
         [c] {
             const unsigned Kmax = c.quick ? 4 : 6;
             for (unsigned K = 1; K <= Kmax; ++K)
                 for (LVariant v : {LVariant::plain, LVariant::single, LVariant::dbl}) {
                     if (v == LVariant::dbl && K < 2) continue;
                     double d = std::abs(functional_L(K, v).value - functional_L_closed(K, v));
                     if (d > 1e-8) return ok(false, "K=" + std::to_string(K) + " gap=" + num(d));
                 }
             return ok(true);
         }},
        {"sigma_cases",
         [c] {
             uint64_t checked = 0;
             for (uint64_t p : primes_up_to(c.quick ? 20 : 50)) {
                 const uint64_t other = p == 3 ? 5 : 3;
                 for (SigmaVariant v : {SigmaVariant::S5T, SigmaVariant::S5main, SigmaVariant::S6})
                     for (unsigned K = 1; K <= 3; ++K)
                         for (const SigmaInputs& in : sigma_case_configurations(v, p, K, other)) {
                             ++checked;
                             if (sigma_local(v, p, in) != sigma_bruteforce(v, p, in))
                                 return ok(false, "p=" + std::to_string(p) + " K=" + std::to_string(K));
                         }
             }
             return ok(true, std::to_string(checked) + " configurations");
         }},
        {"selberg_form_mu_plus",
         [] {
             TildeWeights tw = build_tilde_weights(std::vector<uint64_t>{3, 7, 11, 19}, 500);
             for (uint64_t m = 1; m <= 3000; ++m) {
                 double a = selberg_form(m, tw), b = selberg_form_mu_plus(m, tw);
                 if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) return ok(false, "m=" + std::to_string(m));
             }
             return ok(true);
         }},
    };
}

// ---- correlations ----

std::vector<Check> correlation_checks(const Ctx& c) {
    return {
        {"ap_band",
         [c] {
             ExperimentReport r = sum_r2_in_ap(c.quick ? 100000 : 1000000, 1, 1, 1);
             return ok(r.ratio > 0.98 && r.ratio < 1.02, "ratio=" + num(r.ratio));
         }},
        {"pair_zero_case",
         [] {
             ExperimentReport r = sum_r2_pair(20000, 1, 1, 4, 3, 15);
             double g = r.extra_value("gamma");
             return ok(r.empirical == 0 && g == 0, "empirical=" + num(r.empirical) + " gamma=" + num(g));
         }},
        {"hooley_product",
         [c] {
             HooleyProduct h = hooley_t_product(25, 1, c.quick ? 20000 : 100000);
             double gap = std::abs(h.partial_sum - h.closed_product);
             return ok(gap < 1e-6, "gap=" + num(gap));
         }},
        {"hooley_C_definition",
         [] {
             for (uint64_t t = 1; t <= 5000; ++t) {
                 double b = 1;
                 for (auto& [p, e] : trial_factorize(t).factors)
                     if (p % 4 == 1) b = e == 1 ? 0.0 : b / (2.0 - 1.0 / double(p));
                 if (hooley_C(t) != b) return ok(false, "t=" + std::to_string(t));
             }
             return ok(true);
         }},
    };
}

// ---- singular ----

std::vector<Check> singular_checks(const Ctx&) {
    return {
        {"gallagher_identity",
         [] {
             for (unsigned K = 1; K <= 4; ++K)
                 for (uint64_t r : {7ull, 11ull, 13ull, 77ull, 143ull, 1001ull}) {
                     bool small_prime = false;
                     for (auto& [p, e] : trial_factorize(r).factors) small_prime |= p <= K + 1;
                     if (small_prime) continue;
                     if (A_r_identity(r, K) != 0) return ok(false, "r=" + std::to_string(r));
                 }
             return ok(true);
         }},
        {"vector_sum_matches_product",
         [] {
             for (AConvention cv : {AConvention::free_tuples, AConvention::anchored, AConvention::literal})
                 if (A_r_vector_sum(77, 2, cv) != A_r_identity(77, 2, cv))
                     return ok(false, a_convention_name(cv));
             return ok(true);
         }},
        {"surjections",
         [] { return ok(surjections(3, 2) == 6 && surjections(4, 3) == 36 && surjections(2, 3) == 0); }},
        {"local_density_E",
         [] {
             SieveParams P;
             P.x = 1e8;
             P.q = 5;
             P.a_tilde1 = 1;
             P.a_tilde2 = 2;
             P.M = 2;
             P.M1 = 1;
             LinearFormTuple t = s2s::make_tuple(P, {3, 7});
             for (uint64_t p : primes_up_to(60)) {
                 if (p == 2 || P.q % p == 0) continue;
                 for (uint64_t b = 1; b <= 12; ++b) {
                     LocalDensity d = local_density(t, b, p);
                     if (d.E > 1) return ok(false, "p=" + std::to_string(p));
                 }
             }
             return ok(true);
         }},
    };
}

void emit(std::ostream& log, const std::string& suite, const std::string& name, const CheckResult& r, int64_t ms) {
    Json j;
    j["suite"] = suite;
    j["check"] = name;
    j["pass"] = r.pass;
    j["detail"] = r.detail;
    j["runtime_ms"] = ms;
    log << j.dump() << "\n";
}

}  // namespace

int run_verify(const std::string& suite, bool quick, const std::string& inject_fault, std::ostream& log) {
    Ctx c;
    c.quick = quick;
    if (!inject_fault.empty()) {
        if (inject_fault != "weights") throw ValidationError("--inject-fault supports only 'weights'");
        c.corrupt_weights = true;
    }
    const std::vector<std::pair<std::string, std::function<std::vector<Check>(const Ctx&)>>> suites = {
        {"arith", arith_checks},         {"two-squares", two_squares_checks},
        {"rho", rho_checks},             {"weights", weights_checks},
        {"correlations", correlation_checks}, {"singular", singular_checks},
    };
    bool known = suite == "all";
    for (auto& [n, f] : suites) known |= n == suite;
    if (!known) throw ValidationError("unknown suite '" + suite + "'");

    bool all_pass = true;
    for (auto& [name, make] : suites) {
        if (suite != "all" && suite != name) continue;
        for (const Check& ch : make(c)) {
            const auto t0 = std::chrono::steady_clock::now();
            CheckResult r;
            try {
                r = ch.body();
            } catch (const std::exception& e) {
                r = ok(false, std::string("exception: ") + e.what());
            }
            const auto ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
            emit(log, name, ch.name, r, ms);
            all_pass &= r.pass;
        }
    }
    return all_pass ? 0 : 1;
}

}  // namespace s2s
