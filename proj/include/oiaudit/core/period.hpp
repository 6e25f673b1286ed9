#pragma once

#include <cstdint>
#include <string_view>

#include "oiaudit/core/event.hpp"

namespace oiaudit {

enum class SubPeriod : std::uint8_t { FULL, D1, H1, MIN1 };

[[nodiscard]] std::string_view to_string(SubPeriod s) noexcept;
/// Accepts "full", "1d", "1h", "1min" (case-insensitive).
[[nodiscard]] SubPeriod parse_subperiod(std::string_view text);

/// Length of a calendar sub-period in ms; 0 for FULL.
[[nodiscard]] constexpr EpochMs duration_ms(SubPeriod s) noexcept {
    switch (s) {
        case SubPeriod::D1: return 86'400'000;
        case SubPeriod::H1: return 3'600'000;
        case SubPeriod::MIN1: return 60'000;
        case SubPeriod::FULL: break;
    }
    return 0;
}

/// Start of the UTC-aligned sub-period containing `ts`. Unix time has no
/// leap seconds, so multiples of the unit are exactly midnight / top of
/// hour / top of minute.
[[nodiscard]] EpochMs floor_to(EpochMs ts, SubPeriod s) noexcept;

/// Closed time range [start, end] in epoch ms, UTC.
struct PeriodSpec {
    EpochMs start = 0;
    EpochMs end = 0;
    SubPeriod subperiod = SubPeriod::FULL;

    /// Throws std::invalid_argument unless start < end.
    static PeriodSpec make(EpochMs start, EpochMs end, SubPeriod sub = SubPeriod::FULL);

    [[nodiscard]] bool contains(EpochMs ts) const noexcept { return ts >= start && ts <= end; }

    friend bool operator==(const PeriodSpec&, const PeriodSpec&) = default;
};

}  // namespace oiaudit
