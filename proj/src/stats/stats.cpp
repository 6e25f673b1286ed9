#include "oiaudit/stats/stats.hpp"

#include <stdexcept>

#include "oiaudit/core/error.hpp"

namespace oiaudit::stats {

Amount SubPeriodStats::cond_mean_excess() const {
    if (n_excess == 0) return Amount::zero(excess_sum.unit());
    return Amount(excess_sum.value().div_int(static_cast<std::int64_t>(n_excess)), excess_sum.unit());
}

SubPeriodStats subperiod_stats(std::span<const reconcile::PeriodAudit> audits) {
    if (audits.empty()) throw DataError("no coverage");
    const auto& first = audits.front();
    SubPeriodStats s;
    s.market = first.market;
    s.subperiod = first.period.subperiod;
    s.excess_sum = Amount::zero(first.market.native_unit());
    for (const auto& a : audits) {
        if (a.market != first.market || a.period.subperiod != first.period.subperiod) {
            throw std::invalid_argument("subperiod_stats: audits mix markets or granularities");
        }
        if (!a.valid()) continue;
        ++s.n_total;
        if (!a.x_tv.is_zero()) {
            ++s.n_excess;
            s.excess_sum += a.x_tv;
        }
    }
    if (s.n_total == 0) throw DataError("no coverage");
    return s;
}

Decimal avg_price(std::span<const MarketEvent> events, const PeriodSpec& period, PriceWeighting weighting) {
    Decimal sum;
    Decimal weight;
    std::int64_t n = 0;
    for (const auto& e : events) {
        if (!is_trade_like(e.kind) || !period.contains(e.ts)) continue;
        ++n;
        if (weighting == PriceWeighting::UNWEIGHTED) {
            sum += e.price;
        } else {
            // Exact product at 16 digits, kept in raw units to avoid rounding.
            sum += Decimal::from_raw(e.price.raw() * e.size_or_value.value().raw());
            weight += e.size_or_value.value();
        }
    }
    if (n == 0) throw DataError("no price basis");
    if (weighting == PriceWeighting::UNWEIGHTED) return sum.div_int(n);
    return Decimal::from_raw(div_round_half_even(sum.raw(), weight.raw()));
}

}  // namespace oiaudit::stats
