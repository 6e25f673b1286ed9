#include "oiaudit/core/amount.hpp"

#include <stdexcept>
#include <string>

#include "oiaudit/core/error.hpp"

namespace oiaudit {
namespace {

void require_same_unit(const Amount& a, const Amount& b, const char* op) {
    if (a.unit() != b.unit()) {
        throw UnitMismatch(std::string(op) + ": " + std::string(to_string(a.unit())) + " vs " +
                           std::string(to_string(b.unit())));
    }
}

}  // namespace

std::string_view to_string(Unit u) noexcept {
    return u == Unit::USD ? "USD" : "BASE_COIN";
}

Unit parse_unit(std::string_view text) {
    if (text == "USD") return Unit::USD;
    if (text == "BASE_COIN") return Unit::BASE_COIN;
    throw std::invalid_argument("unknown unit: " + std::string(text));
}

Amount::Amount(Decimal value, Unit unit) : value_(value), unit_(unit) {
    if (value.is_negative()) throw std::invalid_argument("Amount must be non-negative, got " + value.to_string());
}

Amount& Amount::operator+=(const Amount& other) {
    require_same_unit(*this, other, "add");
    value_ += other.value_;
    return *this;
}

Amount operator-(const Amount& a, const Amount& b) {
    require_same_unit(a, b, "subtract");
    if (b.value_ > a.value_) throw std::domain_error("Amount subtraction would go negative");
    return Amount(a.value_ - b.value_, a.unit_);
}

std::strong_ordering operator<=>(const Amount& a, const Amount& b) {
    require_same_unit(a, b, "compare");
    return a.value_ <=> b.value_;
}

Decimal delta(const Amount& from, const Amount& to) {
    require_same_unit(from, to, "delta");
    return to.value() - from.value();
}

Amount abs_diff(const Amount& a, const Amount& b) {
    return Amount(delta(a, b).abs(), a.unit());
}

Amount sub_floor(const Amount& a, const Amount& b) {
    const Decimal d = delta(b, a);
    return Amount(d.is_negative() ? Decimal{} : d, a.unit());
}

Amount min(const Amount& a, const Amount& b) {
    return b < a ? b : a;
}

Amount convert(const Amount& amount, Decimal avg_price, Unit target) {
    if (amount.unit() == target) throw UnitMismatch("convert: amount is already in target unit");
    if (!avg_price.is_positive()) throw std::invalid_argument("convert: average price must be positive");
    if (target == Unit::USD) return Amount(mul(amount.value(), avg_price), target);
    return Amount(div(amount.value(), avg_price), target);
}

}  // namespace oiaudit
