#include "s2s/tuples.hpp"

#include "s2s/two_squares.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace s2s {

uint64_t SplitMix64::next() {
    uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t SplitMix64::below(uint64_t bound) {
    if (bound == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t r;
    do r = next();
    while (r >= limit);
    return r % bound;
}

std::string LinearFormTuple::to_json() const {
    nlohmann::ordered_json j;
    j["q"] = q;
    j["a"] = a;
    j["b"] = b;
    j["M"] = M;
    j["k"] = k;
    j["M1"] = M1;
    return j.dump();
}

LinearFormTuple LinearFormTuple::from_json(const std::string& s) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(s);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("bad tuple JSON: ") + e.what());
    }
    LinearFormTuple t;
    t.q = j.at("q").get<uint64_t>();
    t.a = j.at("a").get<std::vector<int64_t>>();
    t.b = j.at("b").get<std::vector<int64_t>>();
    t.M = j.at("M").get<unsigned>();
    t.k = j.at("k").get<unsigned>();
    t.M1 = j.at("M1").get<unsigned>();
    if (t.a.size() != t.b.size() || t.a.size() != static_cast<std::size_t>(t.M) * t.k)
        throw ValidationError("tuple JSON: a, b must have M*k entries");
    return t;
}

namespace {

int64_t smallest_crt(uint64_t residue, uint64_t q) {
    for (uint64_t c = 1; c <= 4 * q; ++c)
        if (c % q == residue % q && c % 4 == 1) return static_cast<int64_t>(c);
    throw ValidationError("no solution to a = a_tilde mod q, a = 1 mod 4");
}

}  // namespace

std::vector<int64_t> build_a_values(const SieveParams& P) {
    validate(P);
    const unsigned K = P.K(), split = P.M1 * P.k;
    const int64_t a1 = smallest_crt(P.a_tilde1, P.q);
    const int64_t a2 = smallest_crt(P.a_tilde2, P.q) + 4 * static_cast<int64_t>(P.q);
    std::vector<int64_t> a(K);
    for (unsigned i = 0; i < K; ++i) a[i] = i < split ? a1 : a2;
    return a;
}

std::vector<std::vector<int64_t>> b_coordinate_ranges(const SieveParams& P) {
    validate(P);
    const unsigned K = P.K(), split = P.M1 * P.k;
    const double H = P.eta / (2.0 * static_cast<double>(P.q)) * std::sqrt(P.log_x());
    std::vector<std::vector<int64_t>> out(K);
    out[0] = {3};
    for (unsigned i = 1; i < K; ++i) {
        int64_t lo, hi;
        if (i < split) {
            lo = 3;
            hi = static_cast<int64_t>(std::floor(H));
        } else {
            lo = static_cast<int64_t>(std::floor(H)) + 1;
            hi = static_cast<int64_t>(std::floor(2 * H));
        }
        for (int64_t v = lo; v <= hi; ++v)
            if (v % 4 == 3) out[i].push_back(v);
    }
    return out;
}

long double count_B(const SieveParams& P) {
    long double c = 1;
    for (auto& r : b_coordinate_ranges(P)) c *= static_cast<long double>(r.size());
    return c;
}

BEnumeration enumerate_B(const SieveParams& P, uint64_t limit, uint64_t seed) {
    BEnumeration out;
    auto ranges = b_coordinate_ranges(P);
    out.total = 1;
    for (auto& r : ranges) out.total *= static_cast<long double>(r.size());
    if (out.total == 0) {
        out.diagnostic = "b-grid is empty: (eta/2q) sqrt(log x) is too small for the requested bins";
        return out;
    }
    const unsigned K = static_cast<unsigned>(ranges.size());
    if (out.total <= static_cast<long double>(limit)) {
        std::vector<std::size_t> idx(K, 0);
        for (;;) {
            std::vector<int64_t> b(K);
            for (unsigned i = 0; i < K; ++i) b[i] = ranges[i][idx[i]];
            out.tuples.push_back(std::move(b));
            unsigned i = K;
            while (i-- > 0) {
                if (++idx[i] < ranges[i].size()) break;
                idx[i] = 0;
            }
            if (i == static_cast<unsigned>(-1)) break;
        }
        return out;
    }
    out.sampled = true;
    SplitMix64 rng(seed);
    std::set<std::vector<int64_t>> picked;
    // Distinct draws; the grid is larger than limit, so this terminates.
    while (picked.size() < limit) {
        std::vector<int64_t> b(K);
        for (unsigned i = 0; i < K; ++i) b[i] = ranges[i][rng.below(ranges[i].size())];
        picked.insert(std::move(b));
    }
    out.tuples.assign(picked.begin(), picked.end());
    return out;
}

LinearFormTuple make_tuple(const SieveParams& P, const std::vector<int64_t>& b) {
    LinearFormTuple t;
    t.q = P.q;
    t.a = build_a_values(P);
    if (b.size() != t.a.size()) throw ValidationError("b must have K entries");
    t.b = b;
    t.M = P.M;
    t.k = P.k;
    t.M1 = P.M1;
    return t;
}

bool is_P_admissible(const LinearFormTuple& t) {
    const unsigned K = t.K();
    std::set<uint64_t> candidates;
    for (uint64_t p : primes_up_to(K)) candidates.insert(p);
    if (t.q > 1)
        for (auto& [p, e] : trial_factorize(t.q).factors) candidates.insert(p);
    for (uint64_t p : candidates) {
        std::vector<bool> covered(p, false);
        uint64_t n_covered = 0;
        const uint64_t qp = t.q % p;
        for (unsigned i = 0; i < K; ++i) {
            const uint64_t c = static_cast<uint64_t>(((t.offset(i) % (int64_t)p) + (int64_t)p) % (int64_t)p);
            if (qp == 0) {
                if (c == 0) return false;  // identically zero mod p
                continue;
            }
            // root: q n + c = 0 mod p
            uint64_t root = 0;
            for (uint64_t n = 0; n < p; ++n)
                if ((qp * n + c) % p == 0) {
                    root = n;
                    break;
                }
            if (!covered[root]) {
                covered[root] = true;
                ++n_covered;
            }
        }
        if (n_covered == p) return false;
    }
    return true;
}

bool in_S_xi(uint64_t n_value, const SieveParams& P, const FactorSieve& sieve) {
    const double X = std::pow(P.x, P.xi);
    for (auto& [p, e] : sieve.factorize(n_value).factors)
        if (p % 4 == 3 && static_cast<double>(p) < X && e == 1) return false;
    return true;
}

WitnessReport verify_witness(uint64_t n, const LinearFormTuple& t, const SieveParams& P,
                             const FactorSieve& sieve) {
    DerivedParams d = derived_params(P);
    WitnessReport r;
    r.n = n;
    const unsigned K = t.K();
    const double X = std::pow(P.x, P.xi);
    const uint64_t window = static_cast<uint64_t>(std::floor(P.eta * std::sqrt(P.log_x())));
    r.window_lo = t.q * n + 1;
    r.window_hi = t.q * n + window;

    for (unsigned i = 0; i < K; ++i)
        if (!sieve.contains(t.eval(i, n))) throw RangeError("l_i(n) outside sieve range");
    if (!sieve.contains(r.window_hi)) throw RangeError("witness window outside sieve range");

    // (i) every bin holds an E-member; (ii) no small 3 mod 4 prime divides any form.
    std::vector<bool> bin_hit(t.M, false);
    r.cond_ii = true;
    for (unsigned i = 0; i < K; ++i) {
        const uint64_t v = t.eval(i, n);
        Factorization f = sieve.factorize(v);
        if (in_E(f)) {
            bin_hit[t.bin_of(i)] = true;
            r.E_members.push_back(v);
        }
        for (auto& [p, e] : f.factors)
            if (p % 4 == 3 && static_cast<double>(p) < X) r.cond_ii = false;
    }
    r.cond_i = std::all_of(bin_hit.begin(), bin_hit.end(), [](bool b) { return b; });
    std::sort(r.E_members.begin(), r.E_members.end());
    r.E_members.erase(std::unique(r.E_members.begin(), r.E_members.end()), r.E_members.end());

    // (iii) every other qn + b in the window is killed by some p || with p < x^xi.
    std::set<int64_t> offsets;
    for (unsigned i = 0; i < K; ++i) offsets.insert(t.offset(i));
    std::vector<uint64_t> gcd_primes = d.W_primes;
    for (auto& [p, e] : trial_factorize(d.q3).factors) gcd_primes.push_back(p);
    r.cond_iii = true;
    for (uint64_t b = 1; b <= window; ++b) {
        if (offsets.count(static_cast<int64_t>(b))) continue;
        const uint64_t m = t.q * n + b;
        bool square_gcd = true;
        for (uint64_t p : gcd_primes)
            if (m % p == 0 && (m / p) % p != 0) square_gcd = false;
        if (!square_gcd) continue;
        bool killed = false;
        for (auto& [p, e] : sieve.factorize(m).factors)
            if (p % 4 == 3 && e == 1 && static_cast<double>(p) < X) killed = true;
        if (!killed) {
            r.cond_iii = false;
            break;
        }
    }

    // Consequence: the members are consecutive in E.
    r.consecutive = true;
    if (!r.E_members.empty()) {
        std::set<uint64_t> members(r.E_members.begin(), r.E_members.end());
        for (uint64_t y = r.E_members.front(); y <= r.E_members.back(); ++y)
            if (!members.count(y) && in_E(sieve.factorize(y))) {
                r.consecutive = false;
                break;
            }
    }
    return r;
}

}  // namespace s2s
