#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oiaudit/core/event.hpp"
#include "oiaudit/core/market.hpp"

namespace oiaudit::testing {

inline MarketId linear_market() { return {"TestEx", "BTC_USDT_P", ContractKind::LINEAR_PERP}; }
inline MarketId inverse_market() { return {"TestEx", "BTC_USD_IP", ContractKind::INVERSE_PERP}; }

inline Decimal dec(const std::string& s) { return Decimal::parse(s); }
inline Amount usd(const std::string& s) { return Amount(Decimal::parse(s), Unit::USD); }
inline Amount btc(const std::string& s) { return Amount(Decimal::parse(s), Unit::BASE_COIN); }

// Small stream builder with automatic seq numbers.
class StreamBuilder {
public:
    explicit StreamBuilder(MarketId m = linear_market()) : market_(std::move(m)) {}

    StreamBuilder& oi(EpochMs ts, const std::string& value) {
        events_.push_back(make_oi_sample(market_, ts, Decimal::parse(value), ++seq_));
        return *this;
    }
    StreamBuilder& trade(EpochMs ts, const std::string& size, const std::string& price = "20000",
                         EventKind kind = EventKind::TRADE) {
        events_.push_back(make_trade(market_, ts, Decimal::parse(size), Decimal::parse(price), ++seq_, kind));
        return *this;
    }
    StreamBuilder& gap(EpochMs from, EpochMs to) {
        events_.push_back(make_gap(market_, from, to, ++seq_));
        return *this;
    }

    [[nodiscard]] const std::vector<MarketEvent>& events() const { return events_; }
    [[nodiscard]] const MarketId& market() const { return market_; }

private:
    MarketId market_;
    std::vector<MarketEvent> events_;
    std::uint64_t seq_ = 0;
};

}  // namespace oiaudit::testing
