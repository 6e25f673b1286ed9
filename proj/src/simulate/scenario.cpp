#include "oiaudit/simulate/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace oiaudit::sim {

bool ReportingPolicy::targets_kind(EventKind k) const noexcept {
    return std::find(targets.begin(), targets.end(), k) != targets.end();
}

void ReportingPolicy::validate() const {
    if (delay_ms < 0) throw std::invalid_argument("DELAY must be non-negative");
    if (!(hide_fraction >= 0.0 && hide_fraction <= 1.0)) throw std::invalid_argument("HIDE fraction must lie in [0, 1]");
    if (amplitude.is_negative()) throw std::invalid_argument("FABRICATE_OI amplitude must be non-negative");
    for (auto k : targets) {
        if (!is_trade_like(k)) throw std::invalid_argument("policy targets must be trade kinds");
    }
}

const char* to_string(ReportingPolicy::Kind k) noexcept {
    switch (k) {
        case ReportingPolicy::Kind::HONEST: return "HONEST";
        case ReportingPolicy::Kind::DELAY: return "DELAY";
        case ReportingPolicy::Kind::HIDE: return "HIDE";
        case ReportingPolicy::Kind::FABRICATE_OI: return "FABRICATE_OI";
    }
    return "?";
}

void ScenarioSpec::validate() const {
    if (n_traders < 2) throw std::invalid_argument("scenario needs at least two traders");
    if (n_steps < 1) throw std::invalid_argument("scenario needs at least one step");
    if (oi_report_cadence_ms < 1) throw std::invalid_argument("OI report cadence must be positive");
    if (start_ts <= 0) throw std::invalid_argument("start_ts must be positive");
    if (mean_gap_ms < 0 || min_gap_ms < 0) throw std::invalid_argument("trade gaps must be non-negative");
    if (!trade_size.lot.is_positive() || !trade_size.min.is_positive() || trade_size.max < trade_size.min) {
        throw std::invalid_argument("trade size distribution must be positive and bounded");
    }
    if (mix.open < 0 || mix.transfer < 0 || mix.close < 0 || mix.open + mix.transfer + mix.close <= 0) {
        throw std::invalid_argument("effect mix weights must be non-negative and not all zero");
    }
    if (liquidation_share < 0 || liquidation_share > 1 || block_share < 0 || block_share > 1) {
        throw std::invalid_argument("liquidation/block shares must lie in [0, 1]");
    }
    if (!start_price.is_positive() || !tick.is_positive()) throw std::invalid_argument("prices must be positive");
    if (burst && (burst->start_step < 0 || burst->length < 0)) throw std::invalid_argument("invalid unwind burst");
    policy.validate();
}

}  // namespace oiaudit::sim
