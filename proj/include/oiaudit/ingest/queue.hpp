#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "oiaudit/ingest/capture.hpp"

namespace oiaudit::ingest {

// The consumer fell behind and the queue hit its capacity.
class QueueOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Single-consumer ordered queue for one market. Producers (one per feed)
/// push in arrival order; push assigns the strictly increasing seq.
class MarketQueue {
public:
    MarketQueue(MarketId market, std::size_t capacity, std::int64_t clock_skew_ms = 5000);

    /// Sets rec.event.seq and enqueues. Throws QueueOverflow when full and
    /// std::invalid_argument for a record of another market.
    std::uint64_t push(CaptureRecord rec);

    /// Moves queued records into `out` (appending). Waits up to `wait` when
    /// empty. Returns false once closed and drained.
    bool pop_batch(std::vector<CaptureRecord>& out, std::chrono::milliseconds wait);

    void close();

    [[nodiscard]] const MarketId& market() const noexcept { return market_; }
    [[nodiscard]] std::uint64_t pushed() const;
    [[nodiscard]] std::uint64_t skew_violations() const;

private:
    MarketId market_;
    std::size_t capacity_;
    std::int64_t clock_skew_ms_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<CaptureRecord> q_;
    std::uint64_t next_seq_ = 1;
    std::uint64_t skew_violations_ = 0;
    bool closed_ = false;
};

/// Quarantine for payloads the normalizer could not map. One line per
/// payload: receipt time, reason, escaped raw bytes.
class DeadLetterWriter {
public:
    explicit DeadLetterWriter(const std::filesystem::path& path);
    ~DeadLetterWriter();
    DeadLetterWriter(const DeadLetterWriter&) = delete;
    DeadLetterWriter& operator=(const DeadLetterWriter&) = delete;

    void write(EpochMs recv_ts, std::string_view reason, std::string_view raw);
    [[nodiscard]] std::uint64_t count() const;

private:
    mutable std::mutex mu_;
    std::FILE* file_ = nullptr;
    std::uint64_t count_ = 0;
};

}  // namespace oiaudit::ingest
