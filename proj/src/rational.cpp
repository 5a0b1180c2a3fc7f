#include "twic/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace twic {

std::string Rational::to_decimal_string() const {
    std::int64_t d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }

    const bool negative = num < 0;
    std::uint64_t mag = negative ? static_cast<std::uint64_t>(-num) : static_cast<std::uint64_t>(num);

    if (d == 1) {
        // Terminating decimal with exactly max(twos, fives) fractional digits.
        int digits = twos > fives ? twos : fives;
        for (int i = 0; i < digits - twos; ++i) mag *= 2;
        for (int i = 0; i < digits - fives; ++i) mag *= 5;
        std::string s = std::to_string(mag);
        if (digits > 0) {
            if (s.size() <= static_cast<size_t>(digits))
                s.insert(0, static_cast<size_t>(digits) + 1 - s.size(), '0');
            s.insert(s.size() - digits, ".");
            while (s.back() == '0') s.pop_back();
            if (s.back() == '.') s.pop_back();
        }
        return negative ? "-" + s : s;
    }

    // Non-terminating: long division to 15 fractional digits.
    std::uint64_t whole = mag / static_cast<std::uint64_t>(den);
    std::uint64_t rem = mag % static_cast<std::uint64_t>(den);
    std::string s = std::to_string(whole);
    s += '.';
    for (int i = 0; i < 15 && rem != 0; ++i) {
        rem *= 10;
        s += static_cast<char>('0' + rem / static_cast<std::uint64_t>(den));
        rem %= static_cast<std::uint64_t>(den);
    }
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return negative ? "-" + s : s;
}

std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    size_t pos = 0;
    auto parse_int = [&](std::int64_t& out) -> bool {
        size_t start = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        size_t digits_start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == digits_start) return false;
        out = std::strtoll(text.substr(start, pos - start).c_str(), nullptr, 10);
        return true;
    };
    std::int64_t n = 0, d = 1;
    if (!parse_int(n)) return std::nullopt;
    if (pos < text.size()) {
        if (text[pos] != '/') return std::nullopt;
        ++pos;
        if (!parse_int(d)) return std::nullopt;
        if (pos != text.size()) return std::nullopt;
        if (d == 0) return std::nullopt;
    }
    return Rational(n, d);
}

}  // namespace twic
