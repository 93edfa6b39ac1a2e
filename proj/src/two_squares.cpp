#include "s2s/two_squares.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace s2s {

namespace {

uint64_t isqrt(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

uint64_t ceil_sqrt(uint64_t n) {
    uint64_t r = isqrt(n);
    return r * r == n ? r : r + 1;
}

constexpr uint64_t kSegment = uint64_t(1) << 20;  // multiple of 64

void set_bit(std::vector<uint64_t>& w, uint64_t i) { w[i >> 6] |= uint64_t(1) << (i & 63); }

void mark_lattice(std::vector<uint64_t>& bits, uint64_t lo, uint64_t s, uint64_t e) {
    for (uint64_t a = 0; 2 * a * a < e; ++a) {
        const uint64_t a2 = a * a;
        uint64_t b = a;
        if (a2 + a2 < s) b = std::max(a, ceil_sqrt(s - a2));
        for (; a2 + b * b < e; ++b) set_bit(bits, a2 + b * b - lo);
    }
}

void mark_factorization(std::vector<uint64_t>& bits, uint64_t lo, uint64_t s, uint64_t e,
                        const std::vector<uint64_t>& primes) {
    constexpr uint64_t kBlock = 1 << 16;
    std::vector<uint64_t> rem;
    std::vector<uint8_t> bad;
    for (uint64_t bs = s; bs < e; bs += kBlock) {
        const uint64_t be = std::min(e, bs + kBlock);
        rem.resize(be - bs);
        bad.assign(be - bs, 0);
        for (uint64_t n = bs; n < be; ++n) rem[n - bs] = n;
        for (uint64_t p : primes) {
            if (p * p >= be) break;
            for (uint64_t m = (bs + p - 1) / p * p; m < be; m += p) {
                uint64_t& r = rem[m - bs];
                unsigned ex = 0;
                while (r % p == 0) {
                    r /= p;
                    ++ex;
                }
                if (p % 4 == 3 && (ex & 1)) bad[m - bs] = 1;
            }
        }
        for (uint64_t n = bs; n < be; ++n) {
            uint64_t r = rem[n - bs];
            if (r > 1 && r % 4 == 3) bad[n - bs] = 1;
            if (!bad[n - bs]) set_bit(bits, n - lo);
        }
    }
}

}  // namespace

TwoSquaresRange::TwoSquaresRange(uint64_t lo, uint64_t hi, EMethod method)
    : lo_(lo), hi_(hi), method_(method), bits_((hi - lo + 63) / 64, 0) {}

uint64_t TwoSquaresRange::count() const {
    uint64_t c = 0;
    for (uint64_t w : bits_) c += static_cast<uint64_t>(__builtin_popcountll(w));
    return c;
}

std::vector<uint64_t> TwoSquaresRange::members() const {
    std::vector<uint64_t> out;
    for_each([&](uint64_t n) { out.push_back(n); });
    return out;
}

TwoSquaresRange enumerate_E(uint64_t lo, uint64_t hi, EMethod method, uint64_t bit_budget) {
    if (lo < 1 || hi <= lo) throw ValidationError("enumerate_E needs 1 <= lo < hi");
    if (hi - lo > bit_budget)
        throw ResourceError("enumeration window of " + std::to_string(hi - lo) + " exceeds bit budget");
    TwoSquaresRange out(lo, hi, method);
    std::vector<uint64_t> primes;
    if (method == EMethod::factorization) primes = primes_up_to(isqrt(hi - 1) + 1);
    const uint64_t segs = (hi - lo + kSegment - 1) / kSegment;
    // Segments own disjoint words of the bitset, so the merge is positional.
    parallel_chunks(segs, [&](std::size_t k) {
        const uint64_t s = lo + k * kSegment;
        const uint64_t e = std::min(hi, s + kSegment);
        if (method == EMethod::lattice)
            mark_lattice(out.words(), lo, s, e);
        else
            mark_factorization(out.words(), lo, s, e, primes);
    });
    return out;
}

TwoSquaresRange enumerate_E(uint64_t lo, uint64_t hi) { return enumerate_E(lo, hi, EMethod::lattice); }

bool in_E(const Factorization& f) {
    for (auto& [p, e] : f.factors)
        if (p % 4 == 3 && (e & 1)) return false;
    return true;
}

uint64_t r2(const Factorization& f) {
    uint64_t r = 4;
    for (auto& [p, e] : f.factors) {
        if (p % 4 == 1) r *= e + 1;
        else if (p % 4 == 3 && (e & 1)) return 0;
    }
    return r;
}

int64_t r2_divisor_sum(const Factorization& f) {
    std::vector<uint64_t> divs{1};
    for (auto& [p, e] : f.factors) {
        if (p == 2) continue;
        std::size_t base = divs.size();
        uint64_t pk = 1;
        for (unsigned j = 1; j <= e; ++j) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    int64_t s = 0;
    for (uint64_t d : divs) s += chi4(static_cast<int64_t>(d));
    return 4 * s;
}

uint64_t count_N(uint64_t x) {
    if (x < 1) throw ValidationError("count_N needs x >= 1");
    return enumerate_E(1, x + 1).count();
}

bool is_E_admissible(uint64_t a, uint64_t q) {
    if (q == 0 || a >= q) throw ValidationError("is_E_admissible needs 0 <= a < q");
    for (auto& [p, e] : trial_factorize(q).factors) {
        unsigned f = 0;
        if (a == 0) {
            f = e;
        } else {
            uint64_t t = a;
            while (f < e && t % p == 0) {
                t /= p;
                ++f;
            }
        }
        if (p % 4 == 3 && (f & 1) && f != e) return false;
        if (p == 2 && e >= f + 2) {
            uint64_t t = a >> f;  // a / 2^f; a != 0 here since f < e
            if (t % 4 == 3) return false;
        }
    }
    return true;
}

namespace {

// Streams consecutive E-windows of length M whose first element is <= xmax.
// fn(first_value, code).
template <class Fn>
void scan_windows(uint64_t xmax, uint64_t q, unsigned M, Fn&& fn) {
    uint64_t qM = 1;
    for (unsigned i = 0; i < M; ++i) qM *= q;
    TwoSquaresRange main = enumerate_E(1, xmax + 1);
    std::vector<uint64_t> tail;
    for (uint64_t ext = 1024; tail.size() + 1 < M; ext *= 2) {
        tail = enumerate_E(xmax + 1, xmax + 1 + ext).members();
        if (ext > (uint64_t(1) << 40)) throw ResourceError("cannot extend enumeration past x");
    }
    std::vector<uint64_t> ring(M, 0);
    uint64_t code = 0, seen = 0;
    auto push = [&](uint64_t n) {
        ring[seen % M] = n;
        code = (code * q + n % q) % qM;
        ++seen;
        if (seen >= M) {
            uint64_t first = ring[(seen - M) % M];
            if (first <= xmax) fn(first, code);
        }
    };
    main.for_each(push);
    for (std::size_t i = 0; i + 1 < M && i < tail.size(); ++i) push(tail[i]);
}

void check_table_size(uint64_t q, unsigned M) {
    if (q == 0 || M == 0) throw ParameterError("pattern tables need q >= 1 and M >= 1");
    long double cells = std::pow(static_cast<long double>(q), M);
    if (cells > static_cast<long double>(uint64_t(1) << 26))
        throw ParameterError("q^M pattern table too large");
}

}  // namespace

uint64_t PatternTable::count_of(const std::vector<uint64_t>& classes) const {
    if (classes.size() != M) throw ValidationError("pattern length mismatch");
    uint64_t code = 0;
    for (uint64_t a : classes) {
        if (a >= q) throw ValidationError("pattern residue out of range");
        code = code * q + a;
    }
    return counts[code];
}

std::vector<PatternTable> pattern_distributions(const std::vector<uint64_t>& xs, uint64_t q, unsigned M) {
    check_table_size(q, M);
    if (xs.empty()) return {};
    if (!std::is_sorted(xs.begin(), xs.end()) || xs.front() < 1)
        throw ValidationError("x values must be ascending and >= 1");
    uint64_t qM = 1;
    for (unsigned i = 0; i < M; ++i) qM *= q;
    std::vector<PatternTable> out(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        out[t].x = xs[t];
        out[t].q = q;
        out[t].M = M;
        out[t].counts.assign(qM, 0);
    }
    scan_windows(xs.back(), q, M, [&](uint64_t first, uint64_t code) {
        for (std::size_t t = xs.size(); t-- > 0;) {
            if (first > xs[t]) break;
            ++out[t].counts[code];
        }
    });
    return out;
}

PatternTable pattern_distribution(uint64_t x, uint64_t q, unsigned M) {
    return pattern_distributions({x}, q, M).front();
}

uint64_t count_patterns(uint64_t x, const PatternSpec& spec) {
    if (spec.classes.empty()) throw ValidationError("pattern must be nonempty");
    if (x < 1) throw ValidationError("count_patterns needs x >= 1");
    for (uint64_t a : spec.classes)
        if (a >= spec.q) throw ValidationError("pattern residues must lie in [0, q)");
    const unsigned M = static_cast<unsigned>(spec.classes.size());
    uint64_t count = 0;
    std::vector<uint64_t> ring(M, 0);
    // Direct matcher: avoids building a q^M table for long patterns.
    TwoSquaresRange main = enumerate_E(1, x + 1);
    std::vector<uint64_t> tail;
    for (uint64_t ext = 1024; tail.size() + 1 < M; ext *= 2) tail = enumerate_E(x + 1, x + 1 + ext).members();
    uint64_t seen = 0;
    auto push = [&](uint64_t n) {
        ring[seen % M] = n;
        ++seen;
        if (seen < M) return;
        uint64_t start = seen - M;
        if (ring[start % M] > x) return;
        for (unsigned i = 0; i < M; ++i)
            if (ring[(start + i) % M] % spec.q != spec.classes[i]) return;
        ++count;
    };
    main.for_each(push);
    for (std::size_t i = 0; i + 1 < M && i < tail.size(); ++i) push(tail[i]);
    return count;
}

std::string pattern_label(const std::vector<uint64_t>& classes) {
    std::string s;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(classes[i]);
    }
    return s;
}

std::string pattern_csv(const PatternTable& t) {
    std::ostringstream out;
    out << "q,pattern,count,x\n";
    std::vector<uint64_t> digits(t.M);
    for (uint64_t code = 0; code < t.counts.size(); ++code) {
        uint64_t c = code;
        for (unsigned i = t.M; i-- > 0;) {
            digits[i] = c % t.q;
            c /= t.q;
        }
        out << t.q << ',' << pattern_label(digits) << ',' << t.counts[code] << ',' << t.x << '\n';
    }
    return out.str();
}

}  // namespace s2s
