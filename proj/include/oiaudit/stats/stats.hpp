#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/core/market.hpp"
#include "oiaudit/core/period.hpp"
#include "oiaudit/reconcile/aggregate.hpp"

namespace oiaudit::stats {

/// Probability of excess and conditional mean excess over the valid
/// sub-periods of one market at one granularity.
struct SubPeriodStats {
    MarketId market;
    SubPeriod subperiod = SubPeriod::D1;
    std::size_t n_total = 0;
    std::size_t n_excess = 0;
    // Exact sum of x_tv over sub-periods with x_tv > 0.
    Amount excess_sum = Amount::zero(Unit::USD);
    std::optional<Decimal> avg_price;  // display conversion basis, set by the caller

    /// n_excess / n_total.
    [[nodiscard]] double p_excess() const noexcept {
        return n_total == 0 ? 0.0 : static_cast<double>(n_excess) / static_cast<double>(n_total);
    }
    /// excess_sum / n_excess, half-even to 8 digits; zero when n_excess == 0.
    [[nodiscard]] Amount cond_mean_excess() const;
};

/// Audits must share market and granularity (std::invalid_argument).
/// Only valid audits count. Throws DataError("no coverage") if none are.
[[nodiscard]] SubPeriodStats subperiod_stats(std::span<const reconcile::PeriodAudit> audits);

enum class PriceWeighting { UNWEIGHTED, VOLUME };

/// Mean trade price over trades with ts in `period`. UNWEIGHTED is the plain
/// mean of tick prices; VOLUME weights each tick by its native size.
/// Throws DataError("no price basis") when no trade falls in the period.
[[nodiscard]] Decimal avg_price(std::span<const MarketEvent> events, const PeriodSpec& period,
                                PriceWeighting weighting = PriceWeighting::UNWEIGHTED);

}  // namespace oiaudit::stats
