#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "oiaudit/core/amount.hpp"

namespace oiaudit {

enum class ContractKind : std::uint8_t { LINEAR_PERP, INVERSE_PERP };

[[nodiscard]] std::string_view to_string(ContractKind k) noexcept;
[[nodiscard]] ContractKind parse_contract_kind(std::string_view text);

/// A (trading pair, exchange) tuple. The native unit follows from the
/// contract kind: inverse contracts are USD-sized, linear ones coin-sized.
struct MarketId {
    std::string exchange;
    std::string symbol;
    ContractKind contract_kind = ContractKind::LINEAR_PERP;

    [[nodiscard]] Unit native_unit() const noexcept {
        return contract_kind == ContractKind::INVERSE_PERP ? Unit::USD : Unit::BASE_COIN;
    }
    [[nodiscard]] std::string key() const { return exchange + ":" + symbol; }

    friend bool operator==(const MarketId&, const MarketId&) = default;
    friend auto operator<=>(const MarketId&, const MarketId&) = default;
};

}  // namespace oiaudit
