#include "cyclochron/numeric.hpp"

#include <charconv>

namespace cyclochron {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

std::string to_string(TickCount n) {
    if (n == 0)
        return "0";
    std::string digits;
    while (n > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(n % 10)));
        n /= 10;
    }
    return {digits.rbegin(), digits.rend()};
}

std::string format_double(double x) {
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (std::isnan(x))
        return "nan";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return {buf, res.ptr};
}

} // namespace cyclochron
