#include "cyclochron/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <utility>

namespace cyclochron {
namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr i128 I64_MAX = std::numeric_limits<i64>::max();
constexpr i128 I64_MIN = std::numeric_limits<i64>::min();

i128 abs128(i128 x) { return x < 0 ? -x : x; }

i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

i64 narrow(i128 x) {
    if (x > I64_MAX || x < I64_MIN)
        throw RationalOverflow("rational arithmetic overflow");
    return static_cast<i64>(x);
}

Rational reduced(i128 n, i128 d) {
    if (d == 0)
        throw DomainError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational{narrow(n), narrow(d)};
}

// Bezout coefficients: a*x + b*y == gcd(a, b), a, b >= 0.
i128 extended_gcd(i128 a, i128 b, i128& x, i128& y) {
    i128 old_r = a, r = b;
    i128 old_s = 1, s = 0;
    i128 old_t = 0, t = 1;
    while (r != 0) {
        i128 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
        old_t -= q * t;
        std::swap(old_t, t);
    }
    x = old_s;
    y = old_t;
    return old_r;
}

} // namespace

Rational Rational::of(std::int64_t n, std::int64_t d) { return reduced(i128(n), i128(d)); }

std::optional<Rational> Rational::from_double(double x) {
    if (!std::isfinite(x))
        return std::nullopt;
    if (x == 0.0)
        return Rational{0, 1};
    int exp = 0;
    double fr = std::frexp(x, &exp);
    i128 m = static_cast<i128>(std::ldexp(fr, 53)); // |m| in [2^52, 2^53)
    int e = exp - 53;
    while (m != 0 && (m & 1) == 0) {
        m >>= 1;
        ++e;
    }
    if (e >= 0) {
        if (e > 61)
            return std::nullopt;
        i128 n = m << e;
        if (n > I64_MAX || n < I64_MIN)
            return std::nullopt;
        return Rational{static_cast<i64>(n), 1};
    }
    if (-e > 62)
        return std::nullopt;
    return Rational{static_cast<i64>(m), i64(1) << (-e)};
}

std::optional<Rational> Rational::parse(const std::string& text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])))
        --e;
    if (b == e)
        return std::nullopt;
    std::string s = text.substr(b, e - b);

    auto parse_int = [](const std::string& part, i128& out) -> bool {
        if (part.empty())
            return false;
        std::size_t i = 0;
        bool neg = false;
        if (part[i] == '+' || part[i] == '-') {
            neg = part[i] == '-';
            ++i;
        }
        if (i == part.size())
            return false;
        i128 v = 0;
        for (; i < part.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(part[i])))
                return false;
            if (v > (I64_MAX - 9) / 10)
                return false;
            v = v * 10 + (part[i] - '0');
        }
        out = neg ? -v : v;
        return true;
    };

    if (auto slash = s.find('/'); slash != std::string::npos) {
        i128 n = 0, d = 0;
        if (!parse_int(s.substr(0, slash), n) || !parse_int(s.substr(slash + 1), d) || d == 0)
            return std::nullopt;
        try {
            return reduced(n, d);
        } catch (const DomainError&) {
            return std::nullopt;
        }
    }

    // Decimal form: sign, digits, optional fraction, optional exponent.
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    i128 mant = 0;
    long digits = 0, frac_digits = 0;
    bool seen_digit = false, in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (in_frac)
                return std::nullopt;
            in_frac = true;
            continue;
        }
        if (c == 'e' || c == 'E')
            break;
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return std::nullopt;
        seen_digit = true;
        if (++digits > 30)
            return std::nullopt;
        mant = mant * 10 + (c - '0');
        if (in_frac)
            ++frac_digits;
    }
    if (!seen_digit)
        return std::nullopt;
    long exp10 = -frac_digits;
    if (i < s.size()) { // exponent part
        ++i;
        i128 ev = 0;
        if (!parse_int(s.substr(i), ev) || ev > 30 || ev < -30)
            return std::nullopt;
        exp10 += static_cast<long>(ev);
    }
    if (neg)
        mant = -mant;
    try {
        i128 num = mant, den = 1;
        for (long k = 0; k < exp10; ++k) {
            num *= 10;
            if (abs128(num) > (i128(1) << 100))
                return std::nullopt;
        }
        for (long k = 0; k < -exp10; ++k) {
            den *= 10;
            if (den > (i128(1) << 100))
                return std::nullopt;
        }
        return reduced(num, den);
    } catch (const RationalOverflow&) {
        return std::nullopt;
    }
}

std::string Rational::str() const {
    std::string s = std::to_string(num);
    if (den != 1)
        s += "/" + std::to_string(den);
    return s;
}

Rational Rational::operator+(const Rational& o) const {
    return reduced(i128(num) * o.den + i128(o.num) * den, i128(den) * o.den);
}

Rational Rational::operator-(const Rational& o) const {
    return reduced(i128(num) * o.den - i128(o.num) * den, i128(den) * o.den);
}

Rational Rational::operator*(const Rational& o) const {
    return reduced(i128(num) * o.num, i128(den) * o.den);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0)
        throw DomainError("rational division by zero");
    return reduced(i128(num) * o.den, i128(den) * o.num);
}

Rational Rational::operator-() const { return Rational{-num, den}; }

bool Rational::operator<(const Rational& o) const {
    return i128(num) * o.den < i128(o.num) * den;
}

std::int64_t Rational::floor() const {
    i64 q = num / den;
    return (num % den != 0 && num < 0) ? q - 1 : q;
}

Rational Rational::frac() const { return *this - Rational{floor(), 1}; }

Rational rational_lcm(const Rational& a, const Rational& b) {
    if (a.num == 0 || b.num == 0)
        throw DomainError("lcm of zero period");
    i128 n1 = abs128(a.num), n2 = abs128(b.num);
    i128 g = gcd128(n1, n2);
    return reduced(n1 / g * n2, gcd128(a.den, b.den));
}

std::optional<Rational> best_rational_within(double x, std::int64_t max_den, double tol) {
    if (!std::isfinite(x) || max_den < 1 || std::fabs(x) > 1e15)
        return std::nullopt;
    if (max_den > 1000000000)
        max_den = 1000000000;

    i128 p_prev = 0, q_prev = 1; // convergent k-2
    i128 p_cur = 1, q_cur = 0;   // convergent k-1
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double fa = std::floor(v);
        if (std::fabs(fa) > 4.0e18)
            break;
        i128 a = static_cast<i128>(fa);
        if (q_cur >= 1 && a > i128(max_den))
            break; // next q would exceed max_den
        i128 p_next = a * p_cur + p_prev;
        i128 q_next = a * q_cur + q_prev;
        if (q_next > i128(max_den))
            break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        // convergent errors shrink monotonically, so the first one inside
        // tol is the simplest admissible rationalization of x
        double err = std::fabs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur));
        if (err <= tol) {
            try {
                return Rational::of(narrow(p_cur), narrow(q_cur));
            } catch (const RationalOverflow&) {
                return std::nullopt;
            }
        }
        double rem = v - fa;
        if (rem == 0.0)
            break;
        v = 1.0 / rem;
    }
    return std::nullopt;
}

std::optional<Congruence> crt_merge(const Congruence& a, const Congruence& b) {
    if (a.modulus <= 0 || b.modulus <= 0)
        throw DomainError("CRT modulus must be positive");
    i128 ra = a.residue % a.modulus;
    if (ra < 0)
        ra += a.modulus;
    i128 rb = b.residue % b.modulus;
    if (rb < 0)
        rb += b.modulus;

    i128 x, y;
    i128 g = extended_gcd(a.modulus, b.modulus, x, y);
    i128 diff = rb - ra;
    if (diff % g != 0)
        return std::nullopt;

    i128 m2g = b.modulus / g;
    constexpr i128 SAFE = i128(1) << 63; // keeps every product below 2^126
    if (m2g > SAFE || a.modulus > SAFE)
        throw RationalOverflow("combined CRT modulus overflow");
    if (m2g != 0 && a.modulus > (i128(1) << 126) / m2g)
        throw RationalOverflow("combined CRT modulus overflow");
    i128 lcm = a.modulus * m2g;

    i128 t = ((diff / g) % m2g) * (x % m2g) % m2g;
    if (t < 0)
        t += m2g;
    i128 res = (ra + a.modulus * t) % lcm;
    if (res < 0)
        res += lcm;
    return Congruence{res, lcm};
}

} // namespace cyclochron
