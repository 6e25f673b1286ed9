#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oiaudit/core/decimal.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/core/market.hpp"

namespace oiaudit::sim {

/// How the synthetic venue misreports its true stream.
struct ReportingPolicy {
    enum class Kind : std::uint8_t { HONEST, DELAY, HIDE, FABRICATE_OI };

    Kind kind = Kind::HONEST;
    EpochMs delay_ms = 0;      // DELAY
    double hide_fraction = 0;  // HIDE, in [0, 1]
    Decimal amplitude;         // FABRICATE_OI, native units
    // Trade kinds a DELAY or HIDE policy acts on.
    std::vector<EventKind> targets{EventKind::LIQUIDATION, EventKind::BLOCK_TRADE};

    static ReportingPolicy honest() { return {}; }
    static ReportingPolicy delay(EpochMs ms) {
        ReportingPolicy p;
        p.kind = Kind::DELAY;
        p.delay_ms = ms;
        return p;
    }
    static ReportingPolicy hide(double fraction) {
        ReportingPolicy p;
        p.kind = Kind::HIDE;
        p.hide_fraction = fraction;
        return p;
    }
    static ReportingPolicy fabricate(Decimal amplitude) {
        ReportingPolicy p;
        p.kind = Kind::FABRICATE_OI;
        p.amplitude = amplitude;
        return p;
    }

    [[nodiscard]] bool targets_kind(EventKind k) const noexcept;
    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
};

[[nodiscard]] const char* to_string(ReportingPolicy::Kind k) noexcept;

// Uniform over multiples of `lot` in [min, max].
struct TradeSizeDist {
    Decimal min = Decimal::parse("0.001");
    Decimal max = Decimal::parse("2");
    Decimal lot = Decimal::parse("0.001");
};

// Relative weights of the three OI effects a trade can have.
struct EffectMix {
    double open = 0.4;
    double transfer = 0.3;
    double close = 0.3;
};

// Steps in [start_step, start_step + length) are forced position
// reductions flagged as liquidations.
struct UnwindBurst {
    std::int64_t start_step = 0;
    std::int64_t length = 0;
};

struct ScenarioSpec {
    MarketId market{"SIM", "BTC_USDT_P", ContractKind::LINEAR_PERP};
    std::int64_t n_traders = 50;
    std::int64_t n_steps = 10'000;
    std::uint64_t rng_seed = 1;
    TradeSizeDist trade_size;
    EpochMs oi_report_cadence_ms = 500;
    EpochMs start_ts = 1'672'531'200'000;  // 2023-01-01T00:00:00Z
    // Inter-trade gap: min_gap_ms + exponential with mean mean_gap_ms, floored to ms.
    double mean_gap_ms = 100.0;
    EpochMs min_gap_ms = 0;
    EffectMix mix;
    double liquidation_share = 0.1;  // of reducing trades
    double block_share = 0.02;       // of opening trades
    std::optional<UnwindBurst> burst;
    Decimal start_price = Decimal::from_int(20'000);
    Decimal tick = Decimal::parse("0.5");
    ReportingPolicy policy;

    /// Throws std::invalid_argument when the spec is unusable.
    void validate() const;
};

}  // namespace oiaudit::sim
