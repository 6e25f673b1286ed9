#include "oiaudit/kernels/subperiods.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

namespace oiaudit::kernels {
namespace {

using reconcile::IntervalLedger;
using reconcile::PeriodAudit;

// First millisecond an interval occupies; zero-length intervals occupy t_end.
EpochMs occupied_from(const IntervalLedger& l) noexcept {
    return std::min(l.t_start + 1, l.t_end);
}

bool overlaps_span(const PeriodSpec& bucket, std::span<const IntervalLedger> intervals) noexcept {
    if (intervals.empty()) return false;
    return bucket.start <= intervals.back().t_end && bucket.end >= occupied_from(intervals.front());
}

}  // namespace

std::vector<PeriodSpec> subperiod_grid(const PeriodSpec& period, SubPeriod unit) {
    if (unit == SubPeriod::FULL) return {PeriodSpec{period.start, period.end, SubPeriod::FULL}};
    const EpochMs step = duration_ms(unit);
    std::vector<PeriodSpec> grid;
    for (EpochMs b = floor_to(period.start, unit); b <= period.end; b += step) {
        grid.push_back(PeriodSpec{std::max(b, period.start), std::min(b + step - 1, period.end), unit});
    }
    return grid;
}

std::vector<PeriodAudit> subperiod_audits(const MarketId& market, std::span<const IntervalLedger> intervals,
                                          const PeriodSpec& period, SubPeriod unit) {
    const std::vector<PeriodSpec> grid = subperiod_grid(period, unit);

    std::vector<const IntervalLedger*> invalid;
    for (const auto& l : intervals) {
        if (!l.valid) invalid.push_back(&l);
    }

    std::vector<PeriodAudit> out(grid.size(), PeriodAudit{market, period});
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(grid.size());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            const PeriodSpec& bucket = grid[static_cast<std::size_t>(k)];
            PeriodAudit audit = reconcile::aggregate(market, reconcile::select_period(intervals, bucket), bucket);
            audit.covered = overlaps_span(bucket, intervals);

            auto it = std::lower_bound(invalid.begin(), invalid.end(), bucket.start,
                                       [](const IntervalLedger* l, EpochMs t) { return l->t_end < t; });
            std::size_t overlapping = 0;
            for (; it != invalid.end() && occupied_from(**it) <= bucket.end; ++it) ++overlapping;
            audit.invalid_intervals = overlapping;

            out[static_cast<std::size_t>(k)] = std::move(audit);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<PeriodAudit> subperiod_audits_serial(const MarketId& market, std::span<const IntervalLedger> intervals,
                                                 const PeriodSpec& period, SubPeriod unit) {
    const std::vector<PeriodSpec> grid = subperiod_grid(period, unit);
    const Unit u = market.native_unit();
    std::vector<PeriodAudit> out;
    out.reserve(grid.size());
    for (const auto& bucket : grid) {
        PeriodAudit a{market, bucket, Amount::zero(u), Amount::zero(u), Amount::zero(u), Amount::zero(u)};
        a.covered = overlaps_span(bucket, intervals);
        out.push_back(std::move(a));
    }
    if (grid.empty()) return out;

    // Bucket index of a timestamp inside the period.
    const EpochMs origin = unit == SubPeriod::FULL ? period.start : floor_to(period.start, unit);
    const EpochMs step = unit == SubPeriod::FULL ? period.end - period.start + 1 : duration_ms(unit);
    auto index_of = [&](EpochMs ts) { return static_cast<std::size_t>((ts - origin) / step); };

    for (const auto& l : intervals) {
        if (!l.valid) {
            const EpochMs lo = std::max(occupied_from(l), period.start);
            const EpochMs hi = std::min(l.t_end, period.end);
            if (lo <= hi) {
                for (std::size_t k = index_of(lo); k <= index_of(hi); ++k) ++out[k].invalid_intervals;
            }
        }
        if (!period.contains(l.t_end)) continue;
        PeriodAudit& a = out[index_of(l.t_end)];
        ++a.intervals;
        if (!l.valid) continue;
        a.o_tv += l.mtv;
        a.v_t += l.volume;
        a.floored_excess += l.excess;
    }
    for (auto& a : out) a.x_tv = sub_floor(a.o_tv, a.v_t);
    return out;
}

}  // namespace oiaudit::kernels
