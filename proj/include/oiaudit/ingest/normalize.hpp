#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oiaudit/ingest/venue.hpp"

namespace oiaudit::ingest {

struct NormalizeResult {
    enum class Outcome : std::uint8_t { EVENTS, IGNORED, REPLY, DEAD_LETTER };

    Outcome outcome = Outcome::IGNORED;
    std::vector<MarketEvent> events;  // seq left at 0
    std::string reply;
    std::string reason;  // why a payload was quarantined
};

/// Turns raw venue payloads into MarketEvents using a descriptor. Every
/// payload ends up as events, an explicit ignore, a reply, or a dead letter.
class Normalizer {
public:
    explicit Normalizer(VenueDescriptor venue);

    [[nodiscard]] NormalizeResult normalize(std::string_view payload, Channel channel, EpochMs recv_ts) const;
    [[nodiscard]] const VenueDescriptor& venue() const noexcept { return venue_; }

private:
    VenueDescriptor venue_;
};

/// Milliseconds since the epoch for "YYYY-MM-DDTHH:MM:SS[.fff...](Z|+00:00)".
[[nodiscard]] EpochMs parse_iso8601_ms(std::string_view text);

/// Decimal from a JSON number or numeric string.
[[nodiscard]] Decimal json_decimal(const json& v);

}  // namespace oiaudit::ingest
