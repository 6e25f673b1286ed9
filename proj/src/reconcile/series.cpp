#include "oiaudit/reconcile/series.hpp"

namespace oiaudit::reconcile {

std::vector<TickExcessPoint> tick_excess_series(std::span<const IntervalLedger> intervals) {
    std::vector<TickExcessPoint> out;
    out.reserve(intervals.size());
    for (const auto& led : intervals) out.push_back({led.t_end, led.excess, led.last_price, led.valid});
    return out;
}

}  // namespace oiaudit::reconcile
