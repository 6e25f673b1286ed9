#pragma once

#include <optional>
#include <span>
#include <vector>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::reconcile {

struct TickExcessPoint {
    EpochMs ts = 0;
    Amount excess = Amount::zero(Unit::USD);
    std::optional<Decimal> last_price;  // absent before the first trade
    bool valid = true;

    friend bool operator==(const TickExcessPoint&, const TickExcessPoint&) = default;
};

/// One point per OI update (interval end): that interval's excess and the
/// last traded price at or before the update. Zero-excess points are kept.
/// Expects PER_OI_UPDATE intervals.
[[nodiscard]] std::vector<TickExcessPoint> tick_excess_series(std::span<const IntervalLedger> intervals);

}  // namespace oiaudit::reconcile
