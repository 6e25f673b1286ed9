#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "oiaudit/ingest/normalize.hpp"
#include "oiaudit/ingest/queue.hpp"

namespace oiaudit::ingest {

struct Url {
    std::string scheme;  // ws, wss, http, https
    std::string host;
    std::string port;
    std::string target;  // path and query, at least "/"

    [[nodiscard]] bool tls() const noexcept { return scheme == "wss" || scheme == "https"; }
};

/// Throws std::invalid_argument for unsupported or malformed URLs.
[[nodiscard]] Url parse_url(std::string_view text);

/// Decompresses a gzip member. Throws std::runtime_error on bad input.
[[nodiscard]] std::string gunzip(std::string_view data);

using Clock = std::function<EpochMs()>;

[[nodiscard]] EpochMs wall_clock_ms();

struct ConnectorOptions {
    Clock clock = wall_clock_ms;
    bool keep_raw = true;
    std::int64_t connect_timeout_ms = 10'000;
    bool verify_tls = true;
};

struct ConnectorStats {
    std::uint64_t messages = 0;
    std::uint64_t events = 0;
    std::uint64_t ignored = 0;
    std::uint64_t dead_letters = 0;
    std::uint64_t sessions = 0;  // websocket handshakes completed
    std::uint64_t gaps = 0;
    std::uint64_t polls_ok = 0;
    std::uint64_t polls_failed = 0;
};

/// Streams one market: a websocket task and, when the descriptor has a REST
/// endpoint, an OI polling task, both feeding one MarketQueue.
///
/// Transient failures reconnect on the descriptor's backoff schedule and
/// record a GAP marker from the last receipt before the outage to the
/// moment the feed is back. A 4xx handshake or poll response (other than
/// 429) is terminal.
class Connector {
public:
    Connector(VenueDescriptor venue, MarketQueue& queue, DeadLetterWriter* dead_letters = nullptr,
              ConnectorOptions opts = {});
    ~Connector();
    Connector(const Connector&) = delete;
    Connector& operator=(const Connector&) = delete;

    void start();
    /// Stops both tasks. An outage still open at this point is closed with
    /// a GAP marker ending now.
    void stop();

    [[nodiscard]] std::optional<std::string> terminal_error() const;
    [[nodiscard]] ConnectorStats stats() const;

private:
    struct WsState;

    void run_ws();
    void run_rest();
    void deliver(std::string_view payload, Channel channel, EpochMs recv_ts, const std::function<void(std::string)>& reply);
    void emit_gap(EpochMs from, EpochMs to);
    void fail(std::string why);
    bool sleep_for_ms(std::int64_t ms);

    Normalizer normalizer_;
    MarketQueue& queue_;
    DeadLetterWriter* dead_letters_;
    ConnectorOptions opts_;

    std::atomic<bool> stop_{false};
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::optional<std::string> terminal_;
    ConnectorStats stats_;
    std::shared_ptr<WsState> ws_state_;
    std::thread ws_thread_;
    std::thread rest_thread_;
};

}  // namespace oiaudit::ingest
