#include "oiaudit/reconcile/aggregate.hpp"

#include <algorithm>
#include <stdexcept>

namespace oiaudit::reconcile {

PeriodAudit aggregate(const MarketId& market, std::span<const IntervalLedger> intervals, const PeriodSpec& period) {
    const Unit unit = market.native_unit();
    PeriodAudit audit{market, period, Amount::zero(unit), Amount::zero(unit), Amount::zero(unit), Amount::zero(unit)};
    audit.intervals = intervals.size();
    audit.covered = !intervals.empty();
    for (const auto& led : intervals) {
        if (!period.contains(led.t_end)) throw std::invalid_argument("aggregate: interval ends outside the period");
        if (!led.valid) {
            ++audit.invalid_intervals;
            continue;
        }
        audit.o_tv += led.mtv;
        audit.v_t += led.volume;
        audit.floored_excess += led.excess;
    }
    audit.x_tv = sub_floor(audit.o_tv, audit.v_t);
    return audit;
}

std::span<const IntervalLedger> select_period(std::span<const IntervalLedger> intervals, const PeriodSpec& period) {
    const auto first = std::lower_bound(intervals.begin(), intervals.end(), period.start,
                                        [](const IntervalLedger& l, EpochMs t) { return l.t_end < t; });
    const auto last = std::upper_bound(first, intervals.end(), period.end,
                                       [](EpochMs t, const IntervalLedger& l) { return t < l.t_end; });
    return intervals.subspan(static_cast<std::size_t>(first - intervals.begin()),
                             static_cast<std::size_t>(last - first));
}

}  // namespace oiaudit::reconcile
