#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oiaudit/core/decimal.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/core/market.hpp"
#include "oiaudit/ingest/capture.hpp"

namespace oiaudit::ingest {

using json = nlohmann::json;

/// Test on one JSON value addressed by a pointer. Pointers starting with
/// '$' are resolved against the whole message, others against the item.
struct Condition {
    enum class Op : std::uint8_t { EQUALS, NOT_EQUALS, EXISTS, ABSENT, PREFIX, IN };

    std::string path;
    Op op = Op::EXISTS;
    json value;

    [[nodiscard]] bool test(const json& item, const json& root) const;
};

struct KindRule {
    std::vector<Condition> when;
    EventKind kind = EventKind::TRADE;
};

/// Resolves `path` against `item`, or against `root` when it starts with '$'.
/// Null when absent.
[[nodiscard]] const json* resolve_pointer(const std::string& path, const json& item, const json& root);

enum class TsFormat : std::uint8_t { S, MS, US, NS, ISO8601 };

[[nodiscard]] TsFormat parse_ts_format(std::string_view text);

/// Maps one message shape to events.
struct MessageRule {
    std::string name;
    Channel channel = Channel::WS;
    std::vector<Condition> when;       // on the message
    std::string items;                 // pointer to an array or object; empty = the message itself
    std::vector<Condition> item_when;  // items failing this are skipped
    EventKind kind = EventKind::TRADE;
    std::vector<KindRule> kind_rules;  // first match overrides `kind`
    std::string size;                  // trade size or OI level
    std::string price;                 // required for trades
    std::string ts;                    // empty = local receipt time
    TsFormat ts_format = TsFormat::MS;
    Decimal size_multiplier = Decimal::from_int(1);
};

/// Reply sent back on the same socket when `when` holds; "${/ptr}" in the
/// template is replaced by the JSON text of that field.
struct PingReply {
    std::vector<Condition> when;
    std::string reply;
};

enum class Compression : std::uint8_t { NONE, GZIP };

/// Data-driven adapter for one market on one venue.
struct VenueDescriptor {
    MarketId market;
    std::string venue_symbol;
    std::string ws_endpoint;
    std::vector<std::string> subscribe;
    std::string rest_oi_endpoint;  // empty when OI arrives on the websocket
    std::int64_t oi_poll_ms = 500;
    std::vector<std::int64_t> reconnect_backoff_ms{250, 500, 1000, 2000, 5000, 10000};
    std::int64_t idle_timeout_ms = 30'000;
    std::int64_t heartbeat_ms = 0;
    std::string heartbeat_message;
    Compression compression = Compression::NONE;
    std::vector<std::string> ignore_text;            // exact non-JSON frames to drop
    std::vector<std::vector<Condition>> ignore;      // JSON frames to drop
    std::vector<PingReply> ping_replies;
    std::vector<MessageRule> rules;

    /// Throws std::invalid_argument on an unusable descriptor.
    void validate() const;
};

[[nodiscard]] VenueDescriptor parse_venue(const json& j);
[[nodiscard]] std::vector<VenueDescriptor> parse_venues(const json& markets);

}  // namespace oiaudit::ingest
