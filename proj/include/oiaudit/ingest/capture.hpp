#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oiaudit/core/event.hpp"
#include "oiaudit/core/market.hpp"

namespace oiaudit::ingest {

// Where a captured event came from.
enum class Channel : std::uint8_t { WS, REST, GAP, SIM };

[[nodiscard]] std::string_view to_string(Channel c) noexcept;
[[nodiscard]] Channel parse_channel(std::string_view text);

struct CaptureRecord {
    static constexpr std::size_t kMaxRawBytes = 4096;

    EpochMs recv_ts = 0;  // local receipt time
    MarketEvent event;
    Channel channel = Channel::WS;
    std::string raw;  // original payload, truncated to kMaxRawBytes

    friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

inline constexpr std::string_view kCaptureMagic = "OICAP/1";

[[nodiscard]] std::string encode_header(const MarketId& market);
/// One framed record line including the trailing newline.
[[nodiscard]] std::string encode_record(const CaptureRecord& rec);

/// Append-only writer for one market's capture file.
///
/// Opening an existing file checks that its header names the same market
/// and cuts off a torn trailing record before appending.
class CaptureWriter {
public:
    CaptureWriter(const std::filesystem::path& path, const MarketId& market);
    ~CaptureWriter();
    CaptureWriter(const CaptureWriter&) = delete;
    CaptureWriter& operator=(const CaptureWriter&) = delete;

    void append(const CaptureRecord& rec);
    void flush();

    [[nodiscard]] std::uint64_t records_written() const noexcept { return written_; }
    [[nodiscard]] const MarketId& market() const noexcept { return market_; }

private:
    MarketId market_;
    std::FILE* file_ = nullptr;
    std::uint64_t written_ = 0;
    std::string buf_;
};

struct ReplayResult {
    MarketId market;
    std::vector<CaptureRecord> records;
    // Set when a torn or corrupt final record was dropped.
    std::optional<std::uint64_t> truncated_at;
    std::uint64_t valid_bytes = 0;

    [[nodiscard]] std::vector<MarketEvent> events() const;
};

/// Reads a capture file in file order. A damaged final record is dropped
/// with a warning; damage before the last record throws DataError with the
/// byte offset of the bad record.
[[nodiscard]] ReplayResult replay(const std::filesystem::path& path);

/// Parses only the header line.
[[nodiscard]] MarketId read_capture_market(const std::filesystem::path& path);

[[nodiscard]] std::string escape_raw(std::string_view raw);
[[nodiscard]] std::string unescape_raw(std::string_view text);

}  // namespace oiaudit::ingest
