#include "oiaudit/core/ordering.hpp"

#include <algorithm>
#include <stdexcept>

namespace oiaudit {
namespace {

bool by_ts_seq(const MarketEvent& a, const MarketEvent& b) noexcept {
    return a.ts != b.ts ? a.ts < b.ts : a.seq < b.seq;
}

}  // namespace

std::vector<MarketEvent> order_events(std::vector<MarketEvent> events) {
    if (!events.empty()) {
        const auto& first = events.front().market;
        for (const auto& e : events) {
            if (e.market.exchange != first.exchange || e.market.symbol != first.symbol) {
                throw std::invalid_argument("order_events: events from mixed markets (" + first.key() + ", " +
                                            e.market.key() + ")");
            }
        }
    }
    std::stable_sort(events.begin(), events.end(), by_ts_seq);
    return events;
}

bool is_ordered(const std::vector<MarketEvent>& events) noexcept {
    return std::is_sorted(events.begin(), events.end(), by_ts_seq);
}

}  // namespace oiaudit
