#pragma once

#include <cstdint>
#include <string_view>

#include "oiaudit/core/decimal.hpp"

namespace oiaudit {

// Inverse perpetuals denominate size and OI in USD; linear in base coin.
enum class Unit : std::uint8_t { USD, BASE_COIN };

[[nodiscard]] std::string_view to_string(Unit u) noexcept;
[[nodiscard]] Unit parse_unit(std::string_view text);

/// Non-negative monetary quantity tagged with its unit.
///
/// Sizes and open-interest levels are Amounts. Signed differences are plain
/// Decimals (see delta()); they are never stored as an Amount.
class Amount {
public:
    /// Throws std::invalid_argument if value < 0.
    Amount(Decimal value, Unit unit);

    static Amount zero(Unit unit) { return Amount(Decimal{}, unit); }

    [[nodiscard]] Decimal value() const noexcept { return value_; }
    [[nodiscard]] Unit unit() const noexcept { return unit_; }
    [[nodiscard]] bool is_zero() const noexcept { return value_.is_zero(); }

    /// Exact sum. Throws UnitMismatch on different units.
    Amount& operator+=(const Amount& other);
    friend Amount operator+(Amount a, const Amount& b) { return a += b; }

    /// Exact difference; throws std::domain_error if it would go negative.
    friend Amount operator-(const Amount& a, const Amount& b);

    friend bool operator==(const Amount&, const Amount&) = default;

    /// Orders by value; throws UnitMismatch on different units.
    friend std::strong_ordering operator<=>(const Amount& a, const Amount& b);

private:
    Decimal value_;
    Unit unit_;
};

/// Signed change to - from.
[[nodiscard]] Decimal delta(const Amount& from, const Amount& to);
/// |a - b|, exact.
[[nodiscard]] Amount abs_diff(const Amount& a, const Amount& b);
/// max(a - b, 0), exact.
[[nodiscard]] Amount sub_floor(const Amount& a, const Amount& b);
[[nodiscard]] Amount min(const Amount& a, const Amount& b);

/// Converts between USD and base coin at `avg_price` (quote per base).
/// BASE_COIN -> USD multiplies, USD -> BASE_COIN divides; half-even to
/// 8 digits. Same-unit conversion throws UnitMismatch.
[[nodiscard]] Amount convert(const Amount& amount, Decimal avg_price, Unit target);

}  // namespace oiaudit
