#include "s2s/singular.hpp"

#include "s2s/arith.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace s2s {

namespace {

uint64_t mod_offset(int64_t v, uint64_t m) {
    int64_t r = v % static_cast<int64_t>(m);
    return static_cast<uint64_t>(r < 0 ? r + static_cast<int64_t>(m) : r);
}

// Distinct residues of the form constants (and optionally b) mod p; this is
// the number of covered root classes when p does not divide q.
unsigned distinct_classes(const LinearFormTuple& t, uint64_t p, const uint64_t* b) {
    std::set<uint64_t> cls;
    for (unsigned i = 0; i < t.K(); ++i) cls.insert(mod_offset(t.offset(i), p));
    if (b) cls.insert(*b % p);
    return static_cast<unsigned>(cls.size());
}

int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LocalDensity local_density(const LinearFormTuple& t, uint64_t b, uint64_t p) {
    if (p < 3 || p % 2 == 0) throw DomainError("local_density needs an odd prime");
    LocalDensity ld;
    ld.p = p;
    const uint64_t p2 = p * p;
    auto hits_form = [&](uint64_t nu) {
        for (unsigned i = 0; i < t.K(); ++i)
            if ((static_cast<unsigned __int128>(t.q) * nu + mod_offset(t.offset(i), p2)) % p == 0) return true;
        return false;
    };
    for (uint64_t nu = 0; nu < p; ++nu)
        if (hits_form(nu) || (static_cast<unsigned __int128>(t.q) * nu + b) % p == 0) ++ld.Np;
    for (uint64_t nu = 0; nu < p2; ++nu) {
        if (hits_form(nu)) {
            ++ld.Np2_tilde;
            continue;
        }
        const unsigned __int128 v = static_cast<unsigned __int128>(t.q) * nu + b;
        if (v % p == 0 && v % p2 != 0) ++ld.Np2_tilde;
    }
    const int64_t E = static_cast<int64_t>(p) * ld.Np - ld.Np2_tilde;
    if (t.q % p != 0 && (E < 0 || E > 1))
        throw NumericalError("p Np - Np2~ = " + std::to_string(E) + " at p = " + std::to_string(p));
    ld.E = static_cast<unsigned>(E < 0 ? 0 : E);
    return ld;
}

BigInt binomial(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

BigInt surjections(unsigned K, unsigned N) {
    BigInt s = 0;
    for (unsigned j = 0; j <= N; ++j) {
        BigInt pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), N - j, K);
        BigInt term = binomial(N, j) * pw;
        if (j % 2) s -= term;
        else s += term;
    }
    return s;
}

std::vector<Rational> gallagher_coefficients(uint64_t p, unsigned K) {
    const Rational P(static_cast<unsigned long>(p));
    Rational base = 1 - 1 / P, denom = 1;
    for (unsigned i = 0; i <= K; ++i) denom *= base;
    std::vector<Rational> a;
    for (unsigned N = 1; N <= K + 1; ++N) a.push_back((1 - Rational(N) / P) / denom - 1);
    return a;
}

const char* a_convention_name(AConvention c) {
    switch (c) {
        case AConvention::free_tuples: return "free";
        case AConvention::anchored: return "anchored";
        case AConvention::literal: return "literal";
    }
    return "?";
}

AConvention a_convention_from_name(const std::string& s) {
    for (AConvention c : {AConvention::free_tuples, AConvention::anchored, AConvention::literal})
        if (s == a_convention_name(c)) return c;
    throw ValidationError("unknown A(r) convention '" + s + "' (free, anchored, literal)");
}

BigInt class_weight(uint64_t p, unsigned K, unsigned N, AConvention c) {
    switch (c) {
        case AConvention::free_tuples: return binomial(p, N) * surjections(K + 1, N);
        case AConvention::anchored:
            if (N == 0) return 0;
            return binomial(p - 1, N - 1) * (surjections(K, N) + surjections(K, N - 1));
        case AConvention::literal: return binomial(p, N) * surjections(K, N);
    }
    return 0;
}

Rational A_local(uint64_t p, unsigned K, AConvention c) {
    if (p <= K + 1) throw DomainError("A(r) needs every prime above K+1");
    auto a = gallagher_coefficients(p, K);
    Rational s = 0;
    for (unsigned N = 1; N <= K + 1; ++N) s += a[N - 1] * Rational(class_weight(p, K, N, c));
    return s;
}

namespace {

std::vector<uint64_t> squarefree_primes(uint64_t r, unsigned K) {
    std::vector<uint64_t> ps;
    for (auto& [p, e] : trial_factorize(r).factors) {
        if (e > 1) throw DomainError("r must be squarefree");
        if (p <= K + 1) throw DomainError("A(r) needs every prime above K+1");
        ps.push_back(p);
    }
    return ps;
}

}  // namespace

Rational A_r_identity(uint64_t r, unsigned K, AConvention c) {
    Rational v = 1;
    for (uint64_t p : squarefree_primes(r, K)) v *= A_local(p, K, c);
    return v;
}

Rational A_r_vector_sum(uint64_t r, unsigned K, AConvention c) {
    auto ps = squarefree_primes(r, K);
    std::vector<std::vector<Rational>> term(ps.size());
    for (std::size_t j = 0; j < ps.size(); ++j) {
        auto a = gallagher_coefficients(ps[j], K);
        for (unsigned N = 1; N <= K + 1; ++N) term[j].push_back(a[N - 1] * Rational(class_weight(ps[j], K, N, c)));
    }
    Rational total = 0;
    std::function<void(std::size_t, Rational)> rec = [&](std::size_t j, Rational acc) {
        if (j == ps.size()) {
            total += acc;
            return;
        }
        for (const Rational& t : term[j]) rec(j + 1, acc * t);
    };
    rec(0, Rational(1));
    return total;
}

std::string A_r_csv(const std::vector<uint64_t>& rs, unsigned K, AConvention c) {
    std::ostringstream out;
    out << "r,K,value\n";
    for (uint64_t r : rs) out << r << ',' << K << ',' << A_r_identity(r, K, c).get_str() << '\n';
    return out.str();
}

SingularBoundPair singular_bound_pair(const LinearFormTuple& t, uint64_t b, const std::vector<uint64_t>& W_primes) {
    SingularBoundPair sp;
    const unsigned K = t.K();
    for (uint64_t p : W_primes) {
        LocalDensity ld = local_density(t, b, p);
        const double P = double(p);
        const double den = std::pow(1 - 1 / P, K + 1.0);
        sp.lhs *= (1 - ld.Np2_tilde / (P * P)) / den;
        if (p > K + 1) sp.rhs *= (1 - ld.Np / P) / den;
    }
    return sp;
}

ExperimentReport gallagher_average(const SieveParams& P, uint64_t sample_limit, uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    DerivedParams d = derived_params(P);
    const unsigned K = P.K();
    ExperimentReport rep;
    rep.name = "gallagher";
    rep.params = {{"x", num(P.x)},     {"q", std::to_string(P.q)}, {"eta", num(P.eta)},
                  {"M", std::to_string(P.M)}, {"M1", std::to_string(P.M1)}, {"k", std::to_string(P.k)},
                  {"sample_limit", std::to_string(sample_limit)}, {"seed", std::to_string(seed)}};
    std::vector<uint64_t> qual;
    for (uint64_t p : d.W_primes)
        if (p > K + 1) qual.push_back(p);
    const double scale = P.eta * std::sqrt(P.log_x());
    rep.predicted = std::pow(scale, K) / std::pow(8.0 * P.q, K - 1.0);
    BEnumeration B = enumerate_B(P, sample_limit, seed);
    if (B.tuples.empty()) {
        rep.diagnostic = B.diagnostic.empty() ? "empty b-grid" : B.diagnostic;
        rep.runtime_ms = elapsed_ms(t0);
        return rep;
    }
    const uint64_t bmax = static_cast<uint64_t>(std::floor(scale));
    std::vector<CompensatedSum> part(B.tuples.size());
    std::vector<uint64_t> nterms(B.tuples.size(), 0), admissible(B.tuples.size(), 0);
    parallel_chunks(B.tuples.size(), [&](std::size_t j) {
        LinearFormTuple t = s2s::make_tuple(P, B.tuples[j]);
        if (!is_P_admissible(t)) return;
        admissible[j] = 1;
        std::set<int64_t> offs;
        for (unsigned i = 0; i < K; ++i) offs.insert(t.offset(i));
        for (uint64_t b = 1; b <= bmax; ++b) {
            if (offs.count(static_cast<int64_t>(b))) continue;
            double prod = 1;
            for (uint64_t p : qual) {
                const double Np = distinct_classes(t, p, &b);
                prod *= (1 - Np / double(p)) / std::pow(1 - 1 / double(p), K + 1.0);
            }
            part[j].add(prod);
            ++nterms[j];
        }
    });
    CompensatedSum total;
    uint64_t terms = 0, adm = 0;
    for (std::size_t j = 0; j < part.size(); ++j) {
        total.merge(part[j]);
        terms += nterms[j];
        adm += admissible[j];
    }
    const double factor = B.sampled ? static_cast<double>(B.total) / double(B.tuples.size()) : 1.0;
    rep.empirical = total.value() * factor;
    rep.terms = terms;
    rep.extra = {{"mean", terms ? total.value() / double(terms) : 0.0},
                 {"grid_size", static_cast<double>(B.total)},
                 {"admissible_tuples", double(adm)},
                 {"sampled", B.sampled ? 1.0 : 0.0},
                 {"qualifying_primes", double(qual.size())}};
    rep.kind = "bound";
    rep.set_ratio();
    rep.runtime_ms = elapsed_ms(t0);
    return rep;
}

ExperimentReport count_admissible_tuples(const SieveParams& P, uint64_t sample_limit, uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    DerivedParams d = derived_params(P);
    const unsigned K = P.K();
    ExperimentReport rep;
    rep.name = "admissible";
    rep.params = {{"x", num(P.x)},     {"q", std::to_string(P.q)}, {"eta", num(P.eta)},
                  {"M", std::to_string(P.M)}, {"M1", std::to_string(P.M1)}, {"k", std::to_string(P.k)},
                  {"sample_limit", std::to_string(sample_limit)}, {"seed", std::to_string(seed)}};
    double W = 1, phiW = 1;
    for (uint64_t p : d.W_primes) {
        W *= double(p);
        phiW *= double(p - 1);
    }
    rep.predicted = std::pow(P.eta / double(P.q), K - 1.0) * std::pow(P.log_x(), (K - 1) / 2.0) *
                    std::pow(phiW / W, double(K)) * W;
    BEnumeration B = enumerate_B(P, sample_limit, seed);
    if (B.tuples.empty()) {
        rep.diagnostic = B.diagnostic.empty() ? "empty b-grid" : B.diagnostic;
        rep.runtime_ms = elapsed_ms(t0);
        return rep;
    }
    std::vector<double> counts(B.tuples.size(), 0.0);
    parallel_chunks(B.tuples.size(), [&](std::size_t j) {
        LinearFormTuple t = s2s::make_tuple(P, B.tuples[j]);
        if (!is_P_admissible(t)) return;
        double c = 1;
        for (uint64_t p : d.W_primes) c *= double(p - distinct_classes(t, p, nullptr));
        counts[j] = c;
    });
    CompensatedSum total;
    uint64_t adm = 0;
    for (double c : counts) {
        total.add(c);
        if (c > 0) ++adm;
    }
    const double factor = B.sampled ? static_cast<double>(B.total) / double(B.tuples.size()) : 1.0;
    rep.empirical = total.value() * factor;
    rep.terms = B.tuples.size();
    rep.extra = {{"admissible_tuples", double(adm)}, {"grid_size", static_cast<double>(B.total)},
                 {"sampled", B.sampled ? 1.0 : 0.0}};
    rep.kind = "bound";
    rep.set_ratio();
    rep.runtime_ms = elapsed_ms(t0);
    return rep;
}

}  // namespace s2s
