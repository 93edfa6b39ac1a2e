// The set E of sums of two squares, r2, E-admissible classes and pattern counts.
#pragma once

#include "s2s/arith.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace s2s {

enum class EMethod { lattice, factorization };

inline constexpr uint64_t kDefaultBitBudget = uint64_t(1) << 33;

class TwoSquaresRange {
public:
    TwoSquaresRange(uint64_t lo, uint64_t hi, EMethod method);

    uint64_t lo() const { return lo_; }
    uint64_t hi() const { return hi_; }
    EMethod method() const { return method_; }
    bool contains(uint64_t n) const {
        if (n < lo_ || n >= hi_) return false;
        uint64_t i = n - lo_;
        return (bits_[i >> 6] >> (i & 63)) & 1;
    }
    uint64_t count() const;
    std::vector<uint64_t> members() const;
    bool same_membership(const TwoSquaresRange& o) const { return lo_ == o.lo_ && hi_ == o.hi_ && bits_ == o.bits_; }

    std::vector<uint64_t>& words() { return bits_; }
    const std::vector<uint64_t>& words() const { return bits_; }

    // Calls fn(n) for each member in increasing order.
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t w = 0; w < bits_.size(); ++w) {
            uint64_t word = bits_[w];
            while (word) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(word));
                fn(lo_ + w * 64 + b);
                word &= word - 1;
            }
        }
    }

private:
    uint64_t lo_, hi_;
    EMethod method_;
    std::vector<uint64_t> bits_;
};

TwoSquaresRange enumerate_E(uint64_t lo, uint64_t hi, EMethod method, uint64_t bit_budget = kDefaultBitBudget);

// The default method: lattice above 1e7 and for every range here, since the
// factorization method is kept as the cross-check.
TwoSquaresRange enumerate_E(uint64_t lo, uint64_t hi);

bool in_E(const Factorization& f);

// 4 * sum over odd d | n of chi4(d), evaluated through the factorization.
uint64_t r2(const Factorization& f);
// Same formula by listing odd divisors.
int64_t r2_divisor_sum(const Factorization& f);

uint64_t count_N(uint64_t x);

bool is_E_admissible(uint64_t a, uint64_t q);

struct PatternSpec {
    uint64_t q = 1;
    std::vector<uint64_t> classes;
};

uint64_t count_patterns(uint64_t x, const PatternSpec& spec);

// counts[code] with code = sum a_i q^(M-i), a_1 most significant.
struct PatternTable {
    uint64_t x = 0, q = 1;
    unsigned M = 1;
    std::vector<uint64_t> counts;
    uint64_t count_of(const std::vector<uint64_t>& classes) const;
};

PatternTable pattern_distribution(uint64_t x, uint64_t q, unsigned M);

// Several x values from one enumeration; xs ascending.
std::vector<PatternTable> pattern_distributions(const std::vector<uint64_t>& xs, uint64_t q, unsigned M);

// CSV with header q,pattern,count,x.
std::string pattern_csv(const PatternTable& t);

std::string pattern_label(const std::vector<uint64_t>& classes);

}  // namespace s2s
