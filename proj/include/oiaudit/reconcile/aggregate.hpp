#pragma once

#include <cstddef>
#include <span>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/market.hpp"
#include "oiaudit/core/period.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::reconcile {

/// Period totals: o_tv = sum of mtv, v_t = sum of volume, both over valid
/// intervals ending in the period; x_tv = max(o_tv - v_t, 0).
struct PeriodAudit {
    MarketId market;
    PeriodSpec period;
    Amount o_tv = Amount::zero(Unit::USD);
    Amount v_t = Amount::zero(Unit::USD);
    Amount x_tv = Amount::zero(Unit::USD);
    // Sum of per-interval excess over valid intervals (tick-level flooring).
    Amount floored_excess = Amount::zero(Unit::USD);
    std::size_t intervals = 0;
    std::size_t invalid_intervals = 0;
    // False when the period lies entirely outside the audited span.
    bool covered = false;

    [[nodiscard]] bool valid() const noexcept { return covered && invalid_intervals == 0; }

    friend bool operator==(const PeriodAudit&, const PeriodAudit&) = default;
};

/// Aggregates intervals whose t_end lies in `period`. Intervals outside the
/// period are a caller error (std::invalid_argument). An empty input yields
/// zeros with intervals == 0 and covered == false.
[[nodiscard]] PeriodAudit aggregate(const MarketId& market, std::span<const IntervalLedger> intervals,
                                    const PeriodSpec& period);

/// Contiguous sub-range of `intervals` (sorted by t_end) ending in `period`.
[[nodiscard]] std::span<const IntervalLedger> select_period(std::span<const IntervalLedger> intervals,
                                                            const PeriodSpec& period);

}  // namespace oiaudit::reconcile
