#pragma once

#include <cstdint>
#include <string_view>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/decimal.hpp"
#include "oiaudit/core/market.hpp"

namespace oiaudit {

using EpochMs = std::int64_t;

enum class EventKind : std::uint8_t {
    TRADE,
    BLOCK_TRADE,
    LIQUIDATION,
    OI_SAMPLE,
    GAP,  // feed outage marker covering [ts, gap_end]
};

// Which clock produced MarketEvent::ts.
enum class TsSource : std::uint8_t { EXCHANGE, LOCAL };

[[nodiscard]] std::string_view to_string(EventKind k) noexcept;
[[nodiscard]] EventKind parse_event_kind(std::string_view text);
[[nodiscard]] std::string_view to_string(TsSource s) noexcept;
[[nodiscard]] TsSource parse_ts_source(std::string_view text);

[[nodiscard]] constexpr bool is_trade_like(EventKind k) noexcept {
    return k == EventKind::TRADE || k == EventKind::BLOCK_TRADE || k == EventKind::LIQUIDATION;
}

/// One normalized feed event.
///
/// `size_or_value` holds the trade size for trade-like kinds and the
/// open-interest level for OI_SAMPLE; it is zero for GAP. `price` is zero
/// when the venue did not supply one (OI samples, gaps).
struct MarketEvent {
    MarketId market;
    EpochMs ts = 0;
    EventKind kind = EventKind::TRADE;
    Amount size_or_value = Amount::zero(Unit::BASE_COIN);
    Decimal price;
    std::uint64_t seq = 0;
    TsSource ts_source = TsSource::EXCHANGE;
    EpochMs gap_end = 0;

    friend bool operator==(const MarketEvent&, const MarketEvent&) = default;
};

/// Throws std::invalid_argument if the event breaks a type invariant.
void validate(const MarketEvent& e);

[[nodiscard]] MarketEvent make_trade(const MarketId& m, EpochMs ts, Decimal size, Decimal price, std::uint64_t seq,
                                     EventKind kind = EventKind::TRADE);
[[nodiscard]] MarketEvent make_oi_sample(const MarketId& m, EpochMs ts, Decimal oi, std::uint64_t seq);
[[nodiscard]] MarketEvent make_gap(const MarketId& m, EpochMs from, EpochMs to, std::uint64_t seq);

}  // namespace oiaudit
