#include "oiaudit/core/event.hpp"

#include <stdexcept>
#include <string>

namespace oiaudit {

std::string_view to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::TRADE: return "TRADE";
        case EventKind::BLOCK_TRADE: return "BLOCK_TRADE";
        case EventKind::LIQUIDATION: return "LIQUIDATION";
        case EventKind::OI_SAMPLE: return "OI_SAMPLE";
        case EventKind::GAP: return "GAP";
    }
    return "?";
}

EventKind parse_event_kind(std::string_view text) {
    if (text == "TRADE") return EventKind::TRADE;
    if (text == "BLOCK_TRADE") return EventKind::BLOCK_TRADE;
    if (text == "LIQUIDATION") return EventKind::LIQUIDATION;
    if (text == "OI_SAMPLE") return EventKind::OI_SAMPLE;
    if (text == "GAP") return EventKind::GAP;
    throw std::invalid_argument("unknown event kind: " + std::string(text));
}

std::string_view to_string(TsSource s) noexcept {
    return s == TsSource::EXCHANGE ? "EXCHANGE" : "LOCAL";
}

TsSource parse_ts_source(std::string_view text) {
    if (text == "EXCHANGE") return TsSource::EXCHANGE;
    if (text == "LOCAL") return TsSource::LOCAL;
    throw std::invalid_argument("unknown timestamp source: " + std::string(text));
}

void validate(const MarketEvent& e) {
    if (e.ts <= 0) throw std::invalid_argument("event timestamp must be positive");
    if (e.size_or_value.unit() != e.market.native_unit()) {
        throw std::invalid_argument("event amount unit differs from market native unit for " + e.market.key());
    }
    if (is_trade_like(e.kind)) {
        if (!e.size_or_value.value().is_positive()) throw std::invalid_argument("trade size must be positive");
        if (!e.price.is_positive()) throw std::invalid_argument("trade price must be positive");
    }
    if (e.kind == EventKind::GAP && e.gap_end < e.ts) throw std::invalid_argument("gap marker ends before it starts");
}

MarketEvent make_trade(const MarketId& m, EpochMs ts, Decimal size, Decimal price, std::uint64_t seq, EventKind kind) {
    MarketEvent e;
    e.market = m;
    e.ts = ts;
    e.kind = kind;
    e.size_or_value = Amount(size, m.native_unit());
    e.price = price;
    e.seq = seq;
    return e;
}

MarketEvent make_oi_sample(const MarketId& m, EpochMs ts, Decimal oi, std::uint64_t seq) {
    MarketEvent e;
    e.market = m;
    e.ts = ts;
    e.kind = EventKind::OI_SAMPLE;
    e.size_or_value = Amount(oi, m.native_unit());
    e.seq = seq;
    return e;
}

MarketEvent make_gap(const MarketId& m, EpochMs from, EpochMs to, std::uint64_t seq) {
    MarketEvent e;
    e.market = m;
    e.ts = from;
    e.kind = EventKind::GAP;
    e.size_or_value = Amount::zero(m.native_unit());
    e.seq = seq;
    e.ts_source = TsSource::LOCAL;
    e.gap_end = to;
    return e;
}

}  // namespace oiaudit
