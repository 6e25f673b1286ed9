#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/core/period.hpp"

namespace oiaudit::reconcile {

/// Where reconciliation intervals end.
struct IntervalMode {
    enum class Kind : std::uint8_t { PER_OI_UPDATE, FIXED };

    Kind kind = Kind::PER_OI_UPDATE;
    SubPeriod unit = SubPeriod::FULL;  // FIXED only; one of D1, H1, MIN1

    static IntervalMode per_oi_update() noexcept { return {}; }
    static IntervalMode fixed(SubPeriod unit) noexcept { return {Kind::FIXED, unit}; }
};

struct AuditConfig {
    static constexpr std::int64_t kMaxTauMs = 1000;

    // Latency allowance: trades up to tau_ms after an interval's end may be
    // attributed back to it.
    std::int64_t tau_ms = 1;
    IntervalMode interval_mode;
    // An interval longer than gap_factor x the median OI cadence is treated
    // as a missed poll and marked invalid. 0 disables the check.
    double gap_factor = 2.0;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// Reconciliation of one interval (t_start, t_end].
struct IntervalLedger {
    EpochMs t_start = 0;
    EpochMs t_end = 0;
    Amount oi_start = Amount::zero(Unit::USD);
    Amount oi_end = Amount::zero(Unit::USD);
    // Own trades (minus what an earlier interval pulled) plus carried_from_next.
    Amount volume = Amount::zero(Unit::USD);
    Amount mtv = Amount::zero(Unit::USD);
    Amount excess = Amount::zero(Unit::USD);
    // Volume from (t_end, t_end + tau] pulled into this interval.
    Amount carried_from_next = Amount::zero(Unit::USD);
    // Own volume that an earlier interval pulled away.
    Amount carried_to_prev = Amount::zero(Unit::USD);
    bool valid = true;
    // Last trade price with ts <= t_end, if any trade was seen yet.
    std::optional<Decimal> last_price;

    friend bool operator==(const IntervalLedger&, const IntervalLedger&) = default;
};

/// Minimal trading volume |oi_next - oi_prev|. Throws UnitMismatch.
[[nodiscard]] Amount mtv(const Amount& oi_prev, const Amount& oi_next);

/// Splits an ordered single-market event stream into reconciliation
/// intervals and attributes trade volume to them.
///
/// Intervals partition (first cut, last cut], where cuts are OI samples
/// (PER_OI_UPDATE) or UTC-aligned boundaries (FIXED). Each trade counts
/// towards exactly one interval, except for the part an earlier interval
/// pulls from its tau window: an interval short of its mtv pulls only its
/// deficit from trades in (t_end, t_end + tau], earliest first. Trades in
/// the tau window after the last cut belong to the trailing interval.
/// Trades at or before the first cut or after last cut + tau are outside
/// the audited span.
///
/// Intervals overlapping a GAP marker, or exceeding the cadence bound, are
/// flagged invalid.
///
/// Throws DataError("no open interest feed") when there are no OI samples,
/// DataError when there are too few cuts to form an interval, and
/// std::invalid_argument for unordered input.
[[nodiscard]] std::vector<IntervalLedger> build_intervals(std::span<const MarketEvent> events,
                                                          const AuditConfig& cfg);

}  // namespace oiaudit::reconcile
