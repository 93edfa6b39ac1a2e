// Shared types: error classes, exact rationals, compensated sums and the
// worker pool used by the parallel loops.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2s {

using Rational = mpq_class;
using BigInt = mpz_class;

// Error taxonomy. The CLI maps validation/domain/parameter errors to exit 2
// and resource errors to exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct RangeError : Error {
    using Error::Error;
};
struct ParameterError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

// Neumaier summation; the log-weighted sums alternate in sign via mu.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    void merge(const CompensatedSum& o) {
        add(o.sum_);
        add(o.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Global worker count (the --threads flag). 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(chunk_index) for chunk_index in [0, chunks) on the worker pool.
// Callers write into per-chunk slots and reduce in chunk order, which keeps
// results independent of scheduling.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body);

// Exact conversion of a finite double to a rational (doubles are dyadic).
Rational to_rational(double v);

inline std::string rational_str(const Rational& r) { return r.get_str(); }

}  // namespace s2s
