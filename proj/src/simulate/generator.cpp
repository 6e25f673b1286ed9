#include "oiaudit/simulate/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "oiaudit/core/ordering.hpp"
#include "oiaudit/simulate/book.hpp"

namespace oiaudit::sim {
namespace {

constexpr int kMaxTries = 64;
constexpr std::uint64_t kPolicySeedSalt = 0x9e3779b97f4a7c15ULL;

class Generator {
public:
    explicit Generator(const ScenarioSpec& spec) : spec_(spec), rng_(spec.rng_seed), book_(spec.n_traders) {}

    Scenario run();

private:
    struct Pick {
        std::int64_t buyer = -1;
        std::int64_t seller = -1;
        Decimal size;
        Effect effect = Effect::OPEN;
    };

    std::int64_t random_trader() {
        return std::uniform_int_distribution<std::int64_t>(0, book_.size() - 1)(rng_);
    }

    template <class Pred>
    std::int64_t find_trader(Pred pred, std::int64_t exclude) {
        for (int t = 0; t < kMaxTries; ++t) {
            const auto i = random_trader();
            if (i != exclude && pred(book_.position(i))) return i;
        }
        const auto offset = random_trader();
        for (std::int64_t k = 0; k < book_.size(); ++k) {
            const auto i = (offset + k) % book_.size();
            if (i != exclude && pred(book_.position(i))) return i;
        }
        return -1;
    }

    Decimal draw_size() {
        const auto& d = spec_.trade_size;
        const auto lo = static_cast<std::int64_t>((d.min.raw() + d.lot.raw() - 1) / d.lot.raw());
        const auto hi = static_cast<std::int64_t>(d.max.raw() / d.lot.raw());
        const auto lots = std::uniform_int_distribution<std::int64_t>(std::max<std::int64_t>(lo, 1), std::max(lo, hi))(rng_);
        return Decimal::from_raw(d.lot.raw() * lots);
    }

    // Largest lot multiple not above `cap`.
    Decimal clip_to_lots(Decimal size, Decimal cap) const {
        const Decimal c = std::min(size, cap);
        const auto lot = spec_.trade_size.lot.raw();
        return Decimal::from_raw((c.raw() / lot) * lot);
    }

    Effect draw_effect(std::int64_t step) {
        if (spec_.burst && step >= spec_.burst->start_step && step < spec_.burst->start_step + spec_.burst->length) {
            return Effect::CLOSE;
        }
        std::discrete_distribution<int> d({spec_.mix.open, spec_.mix.transfer, spec_.mix.close});
        return static_cast<Effect>(d(rng_));
    }

    Pick pick_open(Decimal size) {
        Pick p{-1, -1, size, Effect::OPEN};
        p.buyer = find_trader([](Decimal x) { return !x.is_negative(); }, -1);
        p.seller = find_trader([](Decimal x) { return !x.is_positive(); }, p.buyer);
        return p;
    }

    Pick pick_transfer(Decimal size) {
        Pick p{-1, -1, size, Effect::TRANSFER};
        if (std::bernoulli_distribution(0.5)(rng_)) {
            // A long hands part of its position to a flat or long buyer.
            p.seller = find_trader([](Decimal x) { return x.is_positive(); }, -1);
            if (p.seller < 0) return p;
            p.buyer = find_trader([](Decimal x) { return !x.is_negative(); }, p.seller);
            p.size = clip_to_lots(size, book_.position(p.seller));
        } else {
            // A short covers by buying from a flat or short seller.
            p.buyer = find_trader([](Decimal x) { return x.is_negative(); }, -1);
            if (p.buyer < 0) return p;
            p.seller = find_trader([](Decimal x) { return !x.is_positive(); }, p.buyer);
            p.size = clip_to_lots(size, -book_.position(p.buyer));
        }
        return p;
    }

    Pick pick_close(Decimal size) {
        Pick p{-1, -1, size, Effect::CLOSE};
        p.buyer = find_trader([](Decimal x) { return x.is_negative(); }, -1);
        p.seller = find_trader([](Decimal x) { return x.is_positive(); }, p.buyer);
        if (p.buyer >= 0 && p.seller >= 0) p.size = clip_to_lots(size, std::min(-book_.position(p.buyer), book_.position(p.seller)));
        return p;
    }

    Pick pick(Effect effect) {
        const Decimal size = draw_size();
        Pick p;
        switch (effect) {
            case Effect::OPEN: p = pick_open(size); break;
            case Effect::TRANSFER: p = pick_transfer(size); break;
            case Effect::CLOSE: p = pick_close(size); break;
        }
        if (p.buyer < 0 || p.seller < 0 || !p.size.is_positive()) p = pick_open(size);
        return p;
    }

    EpochMs next_gap() {
        EpochMs gap = spec_.min_gap_ms;
        if (spec_.mean_gap_ms > 0) {
            gap += static_cast<EpochMs>(std::floor(std::exponential_distribution<double>(1.0 / spec_.mean_gap_ms)(rng_)));
        }
        return gap;
    }

    Decimal next_price(Decimal price) {
        const auto steps = std::uniform_int_distribution<int>(-2, 2)(rng_);
        const Decimal next = price + Decimal::from_raw(spec_.tick.raw() * steps);
        return next.is_positive() ? next : spec_.tick;
    }

    const ScenarioSpec& spec_;
    std::mt19937_64 rng_;
    PositionBook book_;
};

Scenario Generator::run() {
    const MarketId& m = spec_.market;
    Scenario out;
    out.truth.n_traders = spec_.n_traders;
    out.truth.rows.reserve(static_cast<std::size_t>(spec_.n_steps));

    std::uint64_t seq = 0;
    EpochMs next_report = spec_.start_ts;
    auto emit_reports_through = [&](EpochMs t) {
        for (; next_report <= t; next_report += spec_.oi_report_cadence_ms) {
            out.true_stream.push_back(make_oi_sample(m, next_report, book_.longs(), ++seq));
            out.truth.oi_reports.push_back({next_report, seq, book_.longs(), book_.longs()});
        }
    };

    EpochMs ts = spec_.start_ts;
    Decimal price = spec_.start_price;
    for (std::int64_t step = 0; step < spec_.n_steps; ++step) {
        ts += std::max<EpochMs>(step == 0 ? 1 : 0, next_gap());
        // Reports strictly before this trade see the book without it.
        emit_reports_through(ts - 1);

        const Effect wanted = draw_effect(step);
        const Pick p = pick(wanted);
        const Decimal oi_delta = book_.trade(p.buyer, p.seller, p.size);
        price = next_price(price);

        EventKind kind = EventKind::TRADE;
        const bool in_burst = spec_.burst && step >= spec_.burst->start_step &&
                              step < spec_.burst->start_step + spec_.burst->length;
        if (p.effect != Effect::OPEN) {
            if (in_burst || std::bernoulli_distribution(spec_.liquidation_share)(rng_)) kind = EventKind::LIQUIDATION;
        } else if (std::bernoulli_distribution(spec_.block_share)(rng_)) {
            kind = EventKind::BLOCK_TRADE;
        }

        out.true_stream.push_back(make_trade(m, ts, p.size, price, ++seq, kind));
        LedgerRow row;
        row.step = step;
        row.ts = ts;
        row.seq = seq;
        row.kind = kind;
        row.size = p.size;
        row.price = price;
        row.buyer = p.buyer;
        row.seller = p.seller;
        row.buyer_pos = book_.position(p.buyer);
        row.seller_pos = book_.position(p.seller);
        row.effect = p.effect;
        row.oi_delta = oi_delta;
        row.oi_after = book_.longs();
        row.long_total = book_.longs();
        row.short_total = book_.shorts();
        row.reported_ts = ts;
        out.truth.rows.push_back(row);
    }
    // Quiet tail so delayed volume still lands inside the reported span.
    const EpochMs tail = (spec_.policy.kind == ReportingPolicy::Kind::DELAY ? spec_.policy.delay_ms : 0) +
                         2 * spec_.oi_report_cadence_ms;
    emit_reports_through(ts + tail);

    out.reported_stream = apply_policy(spec_.policy, out.true_stream, spec_.rng_seed ^ kPolicySeedSalt);

    std::unordered_map<std::uint64_t, const MarketEvent*> by_seq;
    by_seq.reserve(out.reported_stream.size());
    for (const auto& e : out.reported_stream) by_seq.emplace(e.seq, &e);
    for (auto& row : out.truth.rows) {
        const auto it = by_seq.find(row.seq);
        row.reported = it != by_seq.end();
        row.reported_ts = row.reported ? it->second->ts : 0;
    }
    for (auto& r : out.truth.oi_reports) r.reported_oi = by_seq.at(r.seq)->size_or_value.value();
    return out;
}

}  // namespace

const char* to_string(Effect e) noexcept {
    switch (e) {
        case Effect::OPEN: return "OPEN";
        case Effect::TRANSFER: return "TRANSFER";
        case Effect::CLOSE: return "CLOSE";
    }
    return "?";
}

std::vector<Decimal> TruthLedger::positions_after(std::int64_t steps) const {
    std::vector<Decimal> pos(static_cast<std::size_t>(n_traders));
    for (std::int64_t k = 0; k < steps && k < static_cast<std::int64_t>(rows.size()); ++k) {
        const auto& r = rows[static_cast<std::size_t>(k)];
        pos[static_cast<std::size_t>(r.buyer)] = r.buyer_pos;
        pos[static_cast<std::size_t>(r.seller)] = r.seller_pos;
    }
    return pos;
}

Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    return Generator(spec).run();
}

std::vector<MarketEvent> apply_policy(const ReportingPolicy& policy, std::span<const MarketEvent> true_stream,
                                      std::uint64_t seed) {
    policy.validate();
    std::vector<MarketEvent> out;
    out.reserve(true_stream.size());
    std::mt19937_64 rng(seed);

    switch (policy.kind) {
        case ReportingPolicy::Kind::HONEST:
            out.assign(true_stream.begin(), true_stream.end());
            break;
        case ReportingPolicy::Kind::DELAY:
            for (const auto& e : true_stream) {
                out.push_back(e);
                if (policy.targets_kind(e.kind)) out.back().ts += policy.delay_ms;
            }
            if (policy.delay_ms > 0) out = order_events(std::move(out));
            break;
        case ReportingPolicy::Kind::HIDE: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (const auto& e : true_stream) {
                if (policy.targets_kind(e.kind) && u(rng) < policy.hide_fraction) continue;
                out.push_back(e);
            }
            break;
        }
        case ReportingPolicy::Kind::FABRICATE_OI: {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const Decimal amp = policy.amplitude;
            Decimal offset;
            for (const auto& e : true_stream) {
                out.push_back(e);
                if (e.kind != EventKind::OI_SAMPLE || amp.is_zero()) continue;
                offset = Decimal::from_raw(offset.raw() / 2) + mul(amp, Decimal::from_double(u(rng)));
                offset = std::clamp(offset, -amp, amp);
                const Decimal v = e.size_or_value.value() + offset;
                out.back().size_or_value = Amount(v.is_negative() ? Decimal{} : v, e.size_or_value.unit());
            }
            break;
        }
    }
    return out;
}

}  // namespace oiaudit::sim
