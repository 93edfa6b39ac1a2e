#include "s2s/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

namespace s2s {

namespace {

uint64_t isqrt(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

constexpr char kMagic[4] = {'S', '2', 'S', 'Q'};
constexpr uint32_t kVersion = 1;
constexpr uint64_t kBlock = uint64_t(1) << 18;

}  // namespace

bool Factorization::squarefree() const {
    for (auto& [p, e] : factors)
        if (e > 1) return false;
    return true;
}

uint64_t Factorization::radical() const {
    uint64_t r = 1;
    for (auto& [p, e] : factors) r *= p;
    return r;
}

std::vector<uint64_t> primes_up_to(uint64_t n) {
    std::vector<uint64_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (uint64_t i = 2; i * i <= n; ++i)
        if (!comp[i])
            for (uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    for (uint64_t i = 2; i <= n; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

FactorSieve::FactorSieve(uint64_t lo, uint64_t hi, uint64_t budget) : lo_(lo), hi_(hi) {
    if (hi <= lo) throw ValidationError("factor sieve needs lo < hi");
    if (hi > (uint64_t(1) << 62)) throw ValidationError("factor sieve bound exceeds 2^62");
    if (hi - lo > budget)
        throw ResourceError("factor sieve window of " + std::to_string(hi - lo) +
                            " entries exceeds budget " + std::to_string(budget));
    build_base();
    spf_.assign(hi - lo, 0);
    const uint64_t blocks = (hi - lo + kBlock - 1) / kBlock;
    parallel_chunks(blocks, [&](std::size_t b) {
        const uint64_t s = lo + b * kBlock;
        const uint64_t e = std::min(hi, s + kBlock);
        for (uint32_t p32 : base_) {
            const uint64_t p = p32;
            if (p * p >= e) break;
            uint64_t start = std::max(p * p, (s + p - 1) / p * p);
            for (uint64_t m = start; m < e; m += p)
                if (spf_[m - lo] == 0) spf_[m - lo] = p32;
        }
    });
}

void FactorSieve::build_base() {
    base_.clear();
    for (uint64_t p : primes_up_to(isqrt(hi_ - 1) + 1)) base_.push_back(static_cast<uint32_t>(p));
}

uint64_t FactorSieve::spf(uint64_t n) const {
    if (!contains(n)) throw RangeError("spf query " + std::to_string(n) + " outside sieve range");
    if (n < 2) throw DomainError("spf undefined below 2");
    uint32_t v = spf_[n - lo_];
    return v == 0 ? n : v;
}

bool FactorSieve::is_prime(uint64_t n) const { return n >= 2 && spf(n) == n; }

Factorization FactorSieve::factorize(uint64_t n) const {
    if (n == 0) throw DomainError("factorize(0)");
    if (!contains(n) && n != 1)
        throw RangeError("factorize " + std::to_string(n) + " outside sieve range");
    Factorization f;
    f.n = n;
    uint64_t m = n;
    std::size_t bi = 0;  // trial-division cursor for cofactors below the window
    while (m > 1) {
        uint64_t p;
        if (contains(m)) {
            p = spf(m);
        } else {
            p = m;
            for (; bi < base_.size(); ++bi) {
                uint64_t b = base_[bi];
                if (b * b > m) break;
                if (m % b == 0) {
                    p = b;
                    break;
                }
            }
        }
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.factors.emplace_back(p, e);
    }
    return f;
}

void FactorSieve::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&lo_), sizeof lo_);
    out.write(reinterpret_cast<const char*>(&hi_), sizeof hi_);
    out.write(reinterpret_cast<const char*>(spf_.data()),
              static_cast<std::streamsize>(spf_.size() * sizeof(uint32_t)));
    if (!out) throw ResourceError("short write to " + path);
}

FactorSieve FactorSieve::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot read " + path);
    char magic[4];
    uint32_t version = 0;
    FactorSieve s;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&s.lo_), sizeof s.lo_);
    in.read(reinterpret_cast<char*>(&s.hi_), sizeof s.hi_);
    if (!in || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion || s.hi_ <= s.lo_)
        throw ValidationError("bad sieve segment header in " + path);
    s.spf_.resize(s.hi_ - s.lo_);
    in.read(reinterpret_cast<char*>(s.spf_.data()),
            static_cast<std::streamsize>(s.spf_.size() * sizeof(uint32_t)));
    if (!in) throw ValidationError("truncated sieve segment " + path);
    s.build_base();
    return s;
}

FactorSieve build_factor_sieve(uint64_t lo, uint64_t hi, uint64_t budget) {
    return FactorSieve(lo, hi, budget);
}

Factorization factorize(uint64_t n, const FactorSieve& sieve) { return sieve.factorize(n); }

Factorization trial_factorize(uint64_t n) {
    if (n == 0) throw DomainError("factorize(0)");
    Factorization f;
    f.n = n;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.emplace_back(p, e);
    }
    if (n > 1) f.factors.emplace_back(n, 1);
    return f;
}

FactorSieve cached_factor_sieve(uint64_t lo, uint64_t hi) {
    const char* dir = std::getenv("S2S_CACHE_DIR");
    if (!dir || !*dir) return FactorSieve(lo, hi);
    namespace fs = std::filesystem;
    fs::path p = fs::path(dir) / ("spf_" + std::to_string(lo) + "_" + std::to_string(hi) + ".s2sq");
    std::error_code ec;
    if (fs::exists(p, ec)) {
        try {
            return FactorSieve::load(p.string());
        } catch (const Error&) {
            // stale or foreign file: rebuild below
        }
    }
    FactorSieve s(lo, hi);
    fs::create_directories(dir, ec);
    try {
        s.save(p.string());
    } catch (const Error&) {
    }
    return s;
}

int chi4(int64_t n) {
    int64_t r = ((n % 4) + 4) % 4;
    if (r == 1) return 1;
    if (r == 3) return -1;
    return 0;
}

const char* mult_name(Mult m) {
    switch (m) {
        case Mult::mu: return "mu";
        case Mult::phi: return "phi";
        case Mult::tau: return "tau";
        case Mult::g1: return "g1";
        case Mult::g2: return "g2";
        case Mult::g3: return "g3";
        case Mult::g4: return "g4";
        case Mult::g5_additive: return "g5_additive";
        case Mult::g6_additive: return "g6_additive";
        case Mult::g7: return "g7";
        case Mult::psi_g2: return "psi_g2";
    }
    return "?";
}

Mult mult_from_name(const std::string& s) {
    for (Mult m : {Mult::mu, Mult::phi, Mult::tau, Mult::g1, Mult::g2, Mult::g3, Mult::g4,
                   Mult::g5_additive, Mult::g6_additive, Mult::g7, Mult::psi_g2})
        if (s == mult_name(m)) return m;
    throw ValidationError("unknown multiplicative function '" + s + "'");
}

Rational local_factor(Mult m, uint64_t p, unsigned e) {
    const Rational P(static_cast<unsigned long>(p));
    auto squarefree_only = [&] {
        if (e != 1)
            throw DomainError(std::string(mult_name(m)) + " is defined on squarefree arguments only");
    };
    auto odd_only = [&] {
        if (p == 2) throw DomainError(std::string(mult_name(m)) + " is undefined at 2");
    };
    switch (m) {
        case Mult::mu: return e == 1 ? Rational(-1) : Rational(0);
        case Mult::phi: {
            BigInt pe;
            mpz_pow_ui(pe.get_mpz_t(), BigInt(static_cast<unsigned long>(p)).get_mpz_t(), e - 1);
            return Rational(pe * (p - 1));
        }
        case Mult::tau: return Rational(e + 1);
        case Mult::g1: squarefree_only(); return 1 - Rational(chi4(static_cast<int64_t>(p))) / P;
        case Mult::g2:
            squarefree_only();
            odd_only();
            if (p % 4 == 1) return 2 - 1 / P;
            return 1 / P;
        case Mult::g3:
            squarefree_only();
            odd_only();
            if (p % 4 == 1) return (P - 1) * (P - 1) / (P * (P + 1));
            return 1 + 1 / P;
        case Mult::g4:
            squarefree_only();
            odd_only();
            if (p % 4 == 1) return (4 * P * P - 3 * P + 1) / (P * (P + 1));
            return 1 / P;
        case Mult::g7: squarefree_only(); return P + 1;
        case Mult::g5_additive:
        case Mult::g6_additive:
            throw DomainError(std::string(mult_name(m)) + " is additive with log terms; use eval_additive");
        case Mult::psi_g2: throw DomainError("psi_g2 takes (u, t); use psi_g2()");
    }
    throw DomainError("unknown multiplicative function");
}

Rational eval_multiplicative(Mult m, const Factorization& f) {
    Rational r(1);
    for (auto& [p, e] : f.factors) r *= local_factor(m, p, e);
    return r;
}

double additive_local(Mult m, uint64_t p) {
    if (p == 2) throw DomainError("g5/g6 undefined at 2");
    const double P = static_cast<double>(p), L = std::log(P);
    if (m == Mult::g5_additive)
        return p % 4 == 1 ? (2 * P + 1) * L / (P * P - 1) : L / (P * P - 1);
    if (m == Mult::g6_additive) {
        if (p % 4 == 3) return L;
        return (P - 1) * (P - 1) * (2 * P + 1) * L / ((P + 1) * (4 * P * P - 3 * P + 1));
    }
    throw DomainError("additive_local needs g5_additive or g6_additive");
}

double eval_additive(Mult m, const Factorization& f) {
    double s = 0.0;
    for (auto& [p, e] : f.factors) s += additive_local(m, p);
    return s;
}

Rational psi_g2(uint64_t u, uint64_t t) {
    uint64_t g = std::gcd(u, t);
    uint64_t h = std::gcd(u, t / g);
    return eval_multiplicative(Mult::g2, trial_factorize(h));
}

int mobius(const Factorization& f) {
    for (auto& [p, e] : f.factors)
        if (e > 1) return 0;
    return f.factors.size() % 2 ? -1 : 1;
}

uint64_t euler_phi(const Factorization& f) {
    uint64_t r = 1;
    for (auto& [p, e] : f.factors) {
        r *= p - 1;
        for (unsigned i = 1; i < e; ++i) r *= p;
    }
    return r;
}

int64_t ramanujan_sum(uint64_t t, int64_t h) {
    if (t == 0) throw DomainError("ramanujan_sum needs t >= 1");
    uint64_t g = std::gcd(t, static_cast<uint64_t>(h < 0 ? -h : h));
    int64_t s = 0;
    for (uint64_t d = 1; d <= g; ++d)
        if (g % d == 0) s += mobius(trial_factorize(t / d)) * static_cast<int64_t>(d);
    return s;
}

EulerProductResult landau_ramanujan_A(uint64_t cutoff) {
    if (cutoff < 100) throw ParameterError("landau_ramanujan_A needs cutoff >= 100");
    double log3 = 0.0, log1 = 0.0;
    CompensatedSum s3, s1;
    for (uint64_t p : primes_up_to(cutoff)) {
        double t = std::log1p(-1.0 / (static_cast<double>(p) * static_cast<double>(p)));
        if (p % 4 == 3) s3.add(t);
        else if (p % 4 == 1) s1.add(t);
    }
    log3 = s3.value();
    log1 = s1.value();
    EulerProductResult r;
    r.cutoff = cutoff;
    r.form3 = std::exp(-0.5 * log3) / std::numbers::sqrt2;
    r.form1 = std::numbers::pi / 4 * std::exp(0.5 * log1);
    r.value = 0.5 * (r.form3 + r.form1);
    // form3 increases and form1 decreases with the cutoff, so the limit and
    // every later mean sit between them.
    r.tail_bound = 0.5 * std::abs(r.form3 - r.form1) * (1 + 1e-9) + 1e-15;
    return r;
}

EulerProductResult constant_V(uint64_t cutoff) {
    CompensatedSum s;
    for (uint64_t p : primes_up_to(cutoff))
        if (p % 4 == 1) {
            double d = 2.0 * static_cast<double>(p) - 1.0;
            s.add(std::log1p(1.0 / (d * d)));
        }
    EulerProductResult r;
    r.cutoff = cutoff;
    r.value = std::exp(s.value());
    const double P = static_cast<double>(std::max<uint64_t>(cutoff, 1));
    r.tail_bound = r.value * std::expm1(1.0 / (2.0 * (2.0 * P - 1.0)));
    return r;
}

double landau_A() {
    static const double a = landau_ramanujan_A(1000000).value;
    return a;
}

double v_product_excluding(uint64_t q1, uint64_t cutoff) {
    CompensatedSum s;
    for (uint64_t p : primes_up_to(cutoff))
        if (p % 4 == 1 && (q1 == 0 || q1 % p != 0)) {
            double d = 2.0 * static_cast<double>(p) - 1.0;
            s.add(std::log1p(1.0 / (d * d)));
        }
    return std::exp(s.value());
}

}  // namespace s2s
