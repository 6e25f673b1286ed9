#pragma once

#include <span>
#include <vector>

#include "oiaudit/core/event.hpp"
#include "oiaudit/core/period.hpp"
#include "oiaudit/reconcile/aggregate.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::kernels {

struct MarketAudit {
    MarketId market;
    std::size_t events = 0;
    std::vector<reconcile::IntervalLedger> intervals;
    // One entry per requested unit, in request order.
    std::vector<std::vector<reconcile::PeriodAudit>> by_unit;
};

/// Reconciles and aggregates several markets. Each stream must be a
/// non-empty, (ts, seq)-ordered single-market stream. Markets run in
/// parallel; the first failure is rethrown after all markets finish.
[[nodiscard]] std::vector<MarketAudit> audit_markets(std::span<const std::vector<MarketEvent>> streams,
                                                     const reconcile::AuditConfig& cfg, const PeriodSpec& period,
                                                     std::span<const SubPeriod> units);

/// Serial reference for audit_markets; same results.
[[nodiscard]] std::vector<MarketAudit> audit_markets_serial(std::span<const std::vector<MarketEvent>> streams,
                                                            const reconcile::AuditConfig& cfg,
                                                            const PeriodSpec& period, std::span<const SubPeriod> units);

}  // namespace oiaudit::kernels
