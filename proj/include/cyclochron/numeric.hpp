#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cyclochron/errors.hpp"

namespace cyclochron {

// Counting and phase arithmetic has to stay meaningful over ~1e20 cycles,
// far past the 2^53 integer range of double. The helpers here provide the
// two ingredients: error-free transforms (two_sum / two_prod) and a
// double-double reduction of t/period that keeps the fractional part
// accurate to ~1e-12 cycles even when the quotient itself is 1e20.

struct SplitDouble {
    double hi;
    double lo;
};

// Knuth two-sum: hi + lo == a + b exactly.
inline SplitDouble two_sum(double a, double b) {
    double hi = a + b;
    double ap = hi - b;
    double bp = hi - ap;
    double lo = (a - ap) + (b - bp);
    return {hi, lo};
}

// hi + lo == a * b exactly (FMA-based Dekker product).
inline SplitDouble two_prod(double a, double b) {
    double hi = a * b;
    double lo = std::fma(a, b, -hi);
    return {hi, lo};
}

// Compensated running sum (Neumaier variant). value() returns hi + carry,
// which is the exact sum when the inputs cancel pairwise in double.
class CompensatedSum {
public:
    void add(double x) {
        SplitDouble s = two_sum(hi_, x);
        carry_ += s.lo;
        hi_ = s.hi;
    }
    double value() const { return hi_ + carry_; }

private:
    double hi_ = 0.0;
    double carry_ = 0.0;
};

// Pairwise (cascade) summation: deterministic and O(eps * log n) error.
double pairwise_sum(std::span<const double> xs);

// Fractional part in [0, 1). Collapses an argument that rounds up to an
// integer back to 0.
inline double wrap_unit(double x) {
    double f = x - std::floor(x);
    return f < 1.0 ? f : 0.0;
}

// Signed wrap into [-0.5, 0.5).
inline double wrap_signed(double x) {
    double f = wrap_unit(x);
    return f < 0.5 ? f : f - 1.0;
}

// Distance between phases on the unit circle, in cycles. Range [0, 0.5].
inline double torus_distance(double a, double b) {
    double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return d <= 0.5 ? d : 1.0 - d;
}

// t / period split as (whole + frac) with whole integer-valued. The naive
// quotient loses the fraction entirely past 2^52 cycles; here the residual
// r = t - whole * period is reconstructed with an exact product split, so
// frac carries ~1e-12 absolute error up to |t / period| < 1e22. Beyond that
// the nearbyint rounding slack exceeds useful phase precision and we refuse.
struct CycleSplit {
    double whole; // integer-valued double, |whole| < 1e22
    double frac;  // t / period - whole, small (|frac| << 2^31)
};

inline CycleSplit split_cycles(double t, double period) {
    double q = t / period;
    if (!(std::fabs(q) < 1e22))
        throw DomainError("cycle count exceeds supported range (~1e22 cycles)");
    double n = std::nearbyint(q);
    SplitDouble p = two_prod(n, period);
    double frac = ((t - p.hi) - p.lo) / period;
    return {n, frac};
}

// splitmix64: tiny deterministic generator used for sampling jitter. The
// standard <random> distributions are implementation-defined, which would
// break byte-identical output across platforms, so we map bits ourselves.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits.
inline double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

using TickCount = unsigned __int128;

std::string to_string(TickCount n);

// Shortest decimal form that round-trips (std::to_chars). All serialized
// output goes through this so runs are byte-identical.
std::string format_double(double x);

} // namespace cyclochron
