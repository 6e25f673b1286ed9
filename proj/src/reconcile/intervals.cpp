#include "oiaudit/reconcile/intervals.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "oiaudit/core/error.hpp"

namespace oiaudit::reconcile {
namespace {

struct Cut {
    EpochMs ts;
    Amount oi;
    bool stale = false;
};

struct TradeSlot {
    EpochMs ts;
    Decimal size;
    Decimal remaining;
    Decimal price;
};

struct Span {
    EpochMs from;
    EpochMs to;
};

// Sorted, disjoint union of gap markers.
std::vector<Span> merged_gaps(std::span<const MarketEvent> events) {
    std::vector<Span> gaps;
    for (const auto& e : events) {
        if (e.kind == EventKind::GAP) gaps.push_back({e.ts, std::max(e.ts, e.gap_end)});
    }
    std::sort(gaps.begin(), gaps.end(), [](const Span& a, const Span& b) { return a.from < b.from; });
    std::vector<Span> merged;
    for (const auto& g : gaps) {
        if (!merged.empty() && g.from <= merged.back().to) {
            merged.back().to = std::max(merged.back().to, g.to);
        } else {
            merged.push_back(g);
        }
    }
    return merged;
}

EpochMs median_cadence(const std::vector<EpochMs>& sample_ts) {
    std::vector<EpochMs> deltas;
    for (std::size_t i = 1; i < sample_ts.size(); ++i) {
        if (sample_ts[i] > sample_ts[i - 1]) deltas.push_back(sample_ts[i] - sample_ts[i - 1]);
    }
    if (deltas.size() < 2) return 0;
    auto mid = deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2);
    std::nth_element(deltas.begin(), mid, deltas.end());
    return *mid;
}

bool exceeds(EpochMs length, EpochMs median, double factor) {
    return factor > 0 && median > 0 && static_cast<double>(length) > factor * static_cast<double>(median);
}

std::vector<Cut> oi_update_cuts(std::span<const MarketEvent> events, const std::vector<EpochMs>& sample_ts,
                                const AuditConfig& cfg) {
    std::vector<Cut> cuts;
    cuts.reserve(sample_ts.size());
    for (const auto& e : events) {
        if (e.kind == EventKind::OI_SAMPLE) cuts.push_back({e.ts, e.size_or_value});
    }
    const EpochMs median = median_cadence(sample_ts);
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (exceeds(cuts[i].ts - cuts[i - 1].ts, median, cfg.gap_factor)) cuts[i].stale = true;
    }
    return cuts;
}

std::vector<Cut> fixed_cuts(std::span<const MarketEvent> events, const std::vector<EpochMs>& sample_ts,
                            const AuditConfig& cfg) {
    const SubPeriod unit = cfg.interval_mode.unit;
    const EpochMs step = duration_ms(unit);
    const EpochMs first = sample_ts.front();
    const EpochMs last = sample_ts.back();
    EpochMs b = floor_to(first, unit);
    if (b < first) b += step;

    const EpochMs median = median_cadence(sample_ts);
    std::vector<Cut> cuts;
    std::size_t i = 0;
    const MarketEvent* latest = nullptr;
    for (; b <= last; b += step) {
        for (; i < events.size() && events[i].ts <= b; ++i) {
            if (events[i].kind == EventKind::OI_SAMPLE) latest = &events[i];
        }
        Cut c{b, latest->size_or_value};
        c.stale = exceeds(b - latest->ts, median, cfg.gap_factor);
        cuts.push_back(c);
    }
    return cuts;
}

}  // namespace

void AuditConfig::validate() const {
    if (tau_ms < 0 || tau_ms > kMaxTauMs) {
        throw std::invalid_argument("tau_ms must lie in [0, " + std::to_string(kMaxTauMs) + "]");
    }
    if (interval_mode.kind == IntervalMode::Kind::FIXED && interval_mode.unit == SubPeriod::FULL) {
        throw std::invalid_argument("fixed interval mode needs a calendar unit (1d, 1h, 1min)");
    }
    if (gap_factor < 0) throw std::invalid_argument("gap_factor must be non-negative");
}

Amount mtv(const Amount& oi_prev, const Amount& oi_next) {
    return abs_diff(oi_next, oi_prev);
}

std::vector<IntervalLedger> build_intervals(std::span<const MarketEvent> events, const AuditConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].ts < events[i - 1].ts) {
            throw std::invalid_argument("build_intervals: events not in timestamp order at index " +
                                        std::to_string(i));
        }
    }

    std::vector<EpochMs> sample_ts;
    for (const auto& e : events) {
        if (e.kind == EventKind::OI_SAMPLE) sample_ts.push_back(e.ts);
    }
    if (sample_ts.empty()) throw DataError("no open interest feed");

    const std::vector<Cut> cuts = cfg.interval_mode.kind == IntervalMode::Kind::PER_OI_UPDATE
                                      ? oi_update_cuts(events, sample_ts, cfg)
                                      : fixed_cuts(events, sample_ts, cfg);
    if (cuts.size() < 2) throw DataError("insufficient open interest samples to form an interval");

    const Unit unit = cuts.front().oi.unit();
    std::vector<TradeSlot> trades;
    for (const auto& e : events) {
        if (is_trade_like(e.kind)) {
            if (e.size_or_value.unit() != unit) throw UnitMismatch("build_intervals: trade unit differs from OI unit");
            trades.push_back({e.ts, e.size_or_value.value(), e.size_or_value.value(), e.price});
        }
    }
    const std::vector<Span> gaps = merged_gaps(events);

    const EpochMs tau = cfg.tau_ms;
    std::vector<IntervalLedger> out;
    out.reserve(cuts.size() - 1);

    std::size_t lo = 0;  // first trade with ts > t_start
    while (lo < trades.size() && trades[lo].ts <= cuts.front().ts) ++lo;
    std::optional<Decimal> last_price;
    for (std::size_t k = 0; k < lo; ++k) last_price = trades[k].price;
    std::size_t gap_idx = 0;

    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const Cut& a = cuts[j];
        const Cut& b = cuts[j + 1];
        const bool trailing = j + 2 == cuts.size();

        std::size_t hi = lo;  // one past last trade with ts <= t_end
        Decimal own;
        while (hi < trades.size() && trades[hi].ts <= b.ts) {
            own += trades[hi].remaining;
            last_price = trades[hi].price;
            ++hi;
        }
        IntervalLedger led;
        led.t_start = a.ts;
        led.t_end = b.ts;
        led.oi_start = a.oi;
        led.oi_end = b.oi;
        led.mtv = mtv(a.oi, b.oi);

        Decimal carried;
        const EpochMs window_end = b.ts + tau;
        if (trailing) {
            for (std::size_t k = hi; k < trades.size() && trades[k].ts <= window_end; ++k) {
                carried += trades[k].remaining;
                trades[k].remaining = Decimal{};
            }
        } else if (own < led.mtv.value()) {
            Decimal deficit = led.mtv.value() - own;
            for (std::size_t k = hi; k < trades.size() && trades[k].ts <= window_end && deficit.is_positive(); ++k) {
                const Decimal take = std::min(trades[k].remaining, deficit);
                trades[k].remaining -= take;
                deficit -= take;
                carried += take;
            }
        }
        led.carried_from_next = Amount(carried, unit);
        led.volume = Amount(own + carried, unit);
        led.excess = sub_floor(led.mtv, led.volume);
        led.last_price = last_price;

        while (gap_idx < gaps.size() && gaps[gap_idx].to <= a.ts) ++gap_idx;
        const bool in_gap = gap_idx < gaps.size() && gaps[gap_idx].from <= window_end;
        // An OI-update interval is stale when its own length is excessive; a
        // fixed interval when either boundary reads an outdated sample.
        const bool stale = cfg.interval_mode.kind == IntervalMode::Kind::PER_OI_UPDATE ? b.stale : a.stale || b.stale;
        led.valid = !in_gap && !stale;

        out.push_back(std::move(led));
        lo = hi;
    }

    // Pulls only move volume backwards, so each interval's carried_to_prev
    // is final once the whole pass is done.
    std::size_t t = 0;
    while (t < trades.size() && trades[t].ts <= cuts.front().ts) ++t;
    for (auto& led : out) {
        Decimal pulled;
        for (; t < trades.size() && trades[t].ts <= led.t_end; ++t) pulled += trades[t].size - trades[t].remaining;
        led.carried_to_prev = Amount(pulled, unit);
    }
    return out;
}

}  // namespace oiaudit::reconcile
