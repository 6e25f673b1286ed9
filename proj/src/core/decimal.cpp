#include "oiaudit/core/decimal.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace oiaudit {
namespace {

constexpr Decimal::Raw kPow10[] = {
    1, 10, 100, 1'000, 10'000, 100'000, 1'000'000, 10'000'000, 100'000'000,
};

[[noreturn]] void bad_syntax(std::string_view text) {
    throw std::invalid_argument("invalid decimal literal: '" + std::string(text) + "'");
}

std::string raw_to_digits(Decimal::Raw v) {
    // v >= 0
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return {out.rbegin(), out.rend()};
}

}  // namespace

Decimal::Raw div_round_half_even(Decimal::Raw num, Decimal::Raw den) {
    if (den <= 0) throw std::invalid_argument("div_round_half_even: non-positive denominator");
    const bool negative = num < 0;
    const Decimal::Raw n = negative ? -num : num;
    Decimal::Raw q = n / den;
    const Decimal::Raw r = n % den;
    if (2 * r > den || (2 * r == den && (q & 1) != 0)) ++q;
    return negative ? -q : q;
}

Decimal Decimal::parse(std::string_view text) {
    std::string_view s = text;
    if (s.empty()) bad_syntax(text);
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view int_part = s.substr(0, dot);
    const std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) bad_syntax(text);
    if (dot != std::string_view::npos && frac_part.empty() && int_part.empty()) bad_syntax(text);

    Raw whole = 0;
    for (char c : int_part) {
        if (c < '0' || c > '9') bad_syntax(text);
        whole = whole * 10 + (c - '0');
        if (whole > (Raw{1} << 100)) bad_syntax(text);
    }
    // Keep one extra digit group beyond kScale so we can round.
    Raw frac = 0;
    int kept = 0;
    bool sticky = false;  // any non-zero digit beyond kScale + 1
    int guard = -1;       // digit at position kScale + 1
    for (char c : frac_part) {
        if (c < '0' || c > '9') bad_syntax(text);
        if (kept < kScale) {
            frac = frac * 10 + (c - '0');
            ++kept;
        } else if (guard < 0) {
            guard = c - '0';
        } else if (c != '0') {
            sticky = true;
        }
    }
    frac *= kPow10[kScale - kept];
    Raw raw = whole * kOne + frac;
    if (guard > 5 || (guard == 5 && (sticky || (raw & 1) != 0))) ++raw;
    return from_raw(negative ? -raw : raw);
}

Decimal Decimal::from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("from_double: non-finite value");
    std::array<char, 512> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
    if (ec != std::errc{}) throw std::invalid_argument("from_double: value out of range");
    return parse(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
}

std::string Decimal::to_string() const {
    const bool negative = raw_ < 0;
    const Raw v = negative ? -raw_ : raw_;
    std::string out = negative ? "-" : "";
    out += raw_to_digits(v / kOne);
    Raw frac = v % kOne;
    if (frac != 0) {
        std::string digits = raw_to_digits(frac);
        digits.insert(0, static_cast<std::size_t>(kScale) - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

double Decimal::to_double() const noexcept {
    const Raw whole = raw_ / kOne;
    const Raw frac = raw_ % kOne;
    return static_cast<double>(whole) + static_cast<double>(frac) / static_cast<double>(kOne);
}

Decimal Decimal::round(int digits) const {
    if (digits < 0 || digits > kScale) throw std::invalid_argument("Decimal::round: digits out of range");
    const Raw unit = kPow10[kScale - digits];
    return from_raw(div_round_half_even(raw_, unit) * unit);
}

Decimal Decimal::div_int(std::int64_t divisor) const {
    if (divisor <= 0) throw std::invalid_argument("Decimal::div_int: non-positive divisor");
    return from_raw(div_round_half_even(raw_, divisor));
}

Decimal mul(Decimal a, Decimal b) {
    return Decimal::from_raw(div_round_half_even(a.raw() * b.raw(), Decimal::kOne));
}

Decimal div(Decimal a, Decimal b) {
    if (b.is_zero()) throw std::domain_error("decimal division by zero");
    Decimal::Raw num = a.raw() * Decimal::kOne;
    Decimal::Raw den = b.raw();
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Decimal::from_raw(div_round_half_even(num, den));
}

}  // namespace oiaudit
