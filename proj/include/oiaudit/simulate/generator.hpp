#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oiaudit/core/event.hpp"
#include "oiaudit/simulate/scenario.hpp"

namespace oiaudit::sim {

enum class Effect : std::uint8_t { OPEN, TRANSFER, CLOSE };

[[nodiscard]] const char* to_string(Effect e) noexcept;

/// One executed trade and the resulting book state.
struct LedgerRow {
    std::int64_t step = 0;
    EpochMs ts = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::TRADE;
    Decimal size;
    Decimal price;
    std::int64_t buyer = 0;
    std::int64_t seller = 0;
    Decimal buyer_pos;  // net signed position after the trade
    Decimal seller_pos;
    Effect effect = Effect::OPEN;
    Decimal oi_delta;   // signed change in true OI caused by this trade
    Decimal oi_after;
    Decimal long_total;
    Decimal short_total;
    bool reported = true;   // false when the policy hid it
    EpochMs reported_ts = 0;
};

struct OiReport {
    EpochMs ts = 0;
    std::uint64_t seq = 0;
    Decimal true_oi;
    Decimal reported_oi;
};

/// Ground truth of a generated scenario.
struct TruthLedger {
    std::vector<LedgerRow> rows;
    std::vector<OiReport> oi_reports;
    std::int64_t n_traders = 0;

    /// Net position of every trader after `step` trades (0 = before any).
    [[nodiscard]] std::vector<Decimal> positions_after(std::int64_t steps) const;
};

struct Scenario {
    std::vector<MarketEvent> true_stream;
    std::vector<MarketEvent> reported_stream;
    TruthLedger truth;
};

/// Deterministic in `spec`. The true stream satisfies
/// sum(volume in (r_i, r_{i+1}]) >= |OI(r_{i+1}) - OI(r_i)| for every pair of
/// consecutive OI reports; the reported stream is apply_policy(true).
[[nodiscard]] Scenario generate(const ScenarioSpec& spec);

/// Applies a misreporting policy. DELAY shifts targeted trades forward and
/// re-orders; HIDE drops a seeded fraction of targeted trades; FABRICATE_OI
/// perturbs OI samples with a bounded mean-reverting walk. Prices are never
/// changed and OI samples are never removed.
[[nodiscard]] std::vector<MarketEvent> apply_policy(const ReportingPolicy& policy,
                                                    std::span<const MarketEvent> true_stream, std::uint64_t seed);

}  // namespace oiaudit::sim
