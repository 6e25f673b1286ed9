#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace oiaudit {

/// Signed fixed-point decimal with 8 fractional digits (satoshi granularity).
///
/// Backed by a 128-bit integer so that sums of billions of dollars at full
/// precision never overflow. Addition and subtraction are exact; mul/div
/// round half-to-even back to 8 digits.
class Decimal {
public:
    using Raw = __int128;

    static constexpr int kScale = 8;
    static constexpr Raw kOne = 100'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_raw(Raw raw) noexcept {
        Decimal d;
        d.raw_ = raw;
        return d;
    }
    static constexpr Decimal from_int(std::int64_t v) noexcept { return from_raw(Raw{v} * kOne); }

    /// Parses "[-]digits[.digits]". More than 8 fractional digits are
    /// rounded half-to-even. Throws std::invalid_argument on bad syntax.
    static Decimal parse(std::string_view text);

    /// Shortest fixed notation of a double, then parsed exactly. Intended for
    /// JSON numbers, where the double came from a short decimal literal.
    static Decimal from_double(double v);

    [[nodiscard]] constexpr Raw raw() const noexcept { return raw_; }

    /// Canonical text: no exponent, trailing fractional zeros removed.
    /// parse(to_string()) is the identity.
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] double to_double() const noexcept;

    [[nodiscard]] constexpr bool is_zero() const noexcept { return raw_ == 0; }
    [[nodiscard]] constexpr bool is_negative() const noexcept { return raw_ < 0; }
    [[nodiscard]] constexpr bool is_positive() const noexcept { return raw_ > 0; }
    [[nodiscard]] constexpr Decimal abs() const noexcept { return from_raw(raw_ < 0 ? -raw_ : raw_); }

    /// Rounds half-to-even to `digits` fractional digits (0..8).
    [[nodiscard]] Decimal round(int digits) const;

    /// Integer division of raw units, rounded half-to-even (used for means).
    [[nodiscard]] Decimal div_int(std::int64_t divisor) const;

    constexpr Decimal operator-() const noexcept { return from_raw(-raw_); }
    constexpr Decimal& operator+=(Decimal o) noexcept {
        raw_ += o.raw_;
        return *this;
    }
    constexpr Decimal& operator-=(Decimal o) noexcept {
        raw_ -= o.raw_;
        return *this;
    }
    friend constexpr Decimal operator+(Decimal a, Decimal b) noexcept { return a += b; }
    friend constexpr Decimal operator-(Decimal a, Decimal b) noexcept { return a -= b; }

    friend constexpr bool operator==(Decimal a, Decimal b) noexcept { return a.raw_ == b.raw_; }
    friend constexpr std::strong_ordering operator<=>(Decimal a, Decimal b) noexcept {
        return a.raw_ < b.raw_ ? std::strong_ordering::less
             : a.raw_ > b.raw_ ? std::strong_ordering::greater
                               : std::strong_ordering::equal;
    }

private:
    Raw raw_ = 0;
};

/// a * b rounded half-to-even to 8 fractional digits.
[[nodiscard]] Decimal mul(Decimal a, Decimal b);
/// a / b rounded half-to-even to 8 fractional digits. Throws on b == 0.
[[nodiscard]] Decimal div(Decimal a, Decimal b);

/// num / den rounded half-to-even; den must be positive.
[[nodiscard]] Decimal::Raw div_round_half_even(Decimal::Raw num, Decimal::Raw den);

inline Decimal operator""_dec(const char* text, std::size_t len) {
    return Decimal::parse(std::string_view{text, len});
}

}  // namespace oiaudit
