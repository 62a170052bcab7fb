#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cyclochron/errors.hpp"

namespace cyclochron {

// Exact rationals over int64 with __int128 intermediates. Every operation
// that could leave the representable range throws RationalOverflow; callers
// that have a floating fallback catch it there.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1; // > 0, gcd(num, den) == 1

    static Rational of(std::int64_t n, std::int64_t d);

    // Exact conversion of a finite double (every finite double is rational).
    // Fails only when the denominator 2^k or the scaled numerator would not
    // fit in int64.
    static std::optional<Rational> from_double(double x);

    // Accepts "p/q", plain integers, and decimal strings like "-3.25" or
    // "1e-3" (the mathematical value of the decimal, not of its double
    // rounding). Returns nullopt on malformed input.
    static std::optional<Rational> parse(const std::string& text);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    std::string str() const;

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational operator-() const;

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }

    std::int64_t floor() const;
    // x - floor(x), in [0, 1).
    Rational frac() const;
};

// lcm(a, b) for positive rationals: lcm of numerators over gcd of
// denominators (the least positive rational that both divide integrally).
Rational rational_lcm(const Rational& a, const Rational& b);

// Simplest rational approximation of x within tol (absolute): the first
// continued-fraction convergent p/q that matches, searched in order of
// growing q. Nullopt when no convergent with q <= max_den is close enough,
// so the caller sees the ratio as irrational at this resolution.
std::optional<Rational> best_rational_within(double x, std::int64_t max_den, double tol);

// One congruence x ≡ residue (mod modulus), modulus > 0, on an integer grid.
struct Congruence {
    __int128 residue;
    __int128 modulus;
};

// Generalized CRT over possibly non-coprime moduli. Returns nullopt when the
// congruences are incompatible; throws RationalOverflow when the combined
// modulus leaves __int128.
std::optional<Congruence> crt_merge(const Congruence& a, const Congruence& b);

} // namespace cyclochron
