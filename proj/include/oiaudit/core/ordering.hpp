#pragma once

#include <vector>

#include "oiaudit/core/event.hpp"

namespace oiaudit {

/// Stable sort by (ts, seq). All events must belong to one market
/// (std::invalid_argument otherwise). Idempotent.
[[nodiscard]] std::vector<MarketEvent> order_events(std::vector<MarketEvent> events);

/// True if `events` is already in (ts, seq) order.
[[nodiscard]] bool is_ordered(const std::vector<MarketEvent>& events) noexcept;

}  // namespace oiaudit
