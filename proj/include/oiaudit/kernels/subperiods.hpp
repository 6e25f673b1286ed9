#pragma once

#include <span>
#include <vector>

#include "oiaudit/core/market.hpp"
#include "oiaudit/core/period.hpp"
#include "oiaudit/reconcile/aggregate.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::kernels {

/// Per-sub-period audits of `period` at granularity `unit`.
///
/// Buckets are UTC-aligned [b, b + unit) windows clipped to the period; an
/// interval belongs to the bucket containing its t_end. A bucket is covered
/// when it overlaps the audited span of `intervals`, and every invalid
/// interval overlapping the bucket counts in its invalid_intervals (so
/// buckets inside a feed gap are excluded even when no interval ends in
/// them). FULL yields one audit for the whole period.
///
/// `intervals` is the complete, t_end-ordered output of build_intervals.
/// Runs buckets in parallel with OpenMP.
[[nodiscard]] std::vector<reconcile::PeriodAudit> subperiod_audits(const MarketId& market,
                                                                   std::span<const reconcile::IntervalLedger> intervals,
                                                                   const PeriodSpec& period, SubPeriod unit);

/// Single-pass serial reference for subperiod_audits; same results.
[[nodiscard]] std::vector<reconcile::PeriodAudit> subperiod_audits_serial(
    const MarketId& market, std::span<const reconcile::IntervalLedger> intervals, const PeriodSpec& period,
    SubPeriod unit);

/// Bucket grid shared by both implementations.
[[nodiscard]] std::vector<PeriodSpec> subperiod_grid(const PeriodSpec& period, SubPeriod unit);

}  // namespace oiaudit::kernels
