#include "oiaudit/ingest/queue.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oiaudit/core/error.hpp"

namespace oiaudit::ingest {

MarketQueue::MarketQueue(MarketId market, std::size_t capacity, std::int64_t clock_skew_ms)
    : market_(std::move(market)), capacity_(capacity), clock_skew_ms_(clock_skew_ms) {
    if (capacity_ == 0) throw std::invalid_argument("queue capacity must be positive");
}

std::uint64_t MarketQueue::push(CaptureRecord rec) {
    if (rec.event.market != market_) throw std::invalid_argument("record for " + rec.event.market.key() + " in queue of " + market_.key());
    std::uint64_t seq = 0;
    {
        std::lock_guard lock(mu_);
        if (closed_) throw std::logic_error("push to closed queue");
        if (q_.size() >= capacity_) {
            throw QueueOverflow(fmt::format("capture queue for {} is full ({} records); consumer is not keeping up",
                                            market_.key(), capacity_));
        }
        if (rec.event.ts_source == TsSource::EXCHANGE && rec.recv_ts < rec.event.ts - clock_skew_ms_) {
            if (skew_violations_++ % 1000 == 0) {
                spdlog::warn("{}: receipt time {} is {} ms before exchange time {} (skew limit {} ms)", market_.key(),
                             rec.recv_ts, rec.event.ts - rec.recv_ts, rec.event.ts, clock_skew_ms_);
            }
        }
        seq = next_seq_++;
        rec.event.seq = seq;
        q_.push_back(std::move(rec));
    }
    cv_.notify_one();
    return seq;
}

bool MarketQueue::pop_batch(std::vector<CaptureRecord>& out, std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    if (q_.empty() && !closed_) cv_.wait_for(lock, wait, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return !closed_;
    while (!q_.empty()) {
        out.push_back(std::move(q_.front()));
        q_.pop_front();
    }
    return true;
}

void MarketQueue::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

std::uint64_t MarketQueue::pushed() const {
    std::lock_guard lock(mu_);
    return next_seq_ - 1;
}

std::uint64_t MarketQueue::skew_violations() const {
    std::lock_guard lock(mu_);
    return skew_violations_;
}

DeadLetterWriter::DeadLetterWriter(const std::filesystem::path& path) {
    file_ = std::fopen(path.c_str(), "ab");
    if (!file_) throw DataError("cannot open dead-letter file " + path.string());
}

DeadLetterWriter::~DeadLetterWriter() {
    if (file_) std::fclose(file_);
}

void DeadLetterWriter::write(EpochMs recv_ts, std::string_view reason, std::string_view raw) {
    const auto line = fmt::format("{}\t{}\t{}\n", recv_ts, escape_raw(reason), escape_raw(raw));
    std::lock_guard lock(mu_);
    std::fwrite(line.data(), 1, line.size(), file_);
    std::fflush(file_);
    ++count_;
}

std::uint64_t DeadLetterWriter::count() const {
    std::lock_guard lock(mu_);
    return count_;
}

}  // namespace oiaudit::ingest
