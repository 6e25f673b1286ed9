#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oiaudit/ingest/config.hpp"
#include "oiaudit/ingest/connector.hpp"

namespace oiaudit::report {

struct CaptureRunOptions {
    std::filesystem::path out;
    std::optional<std::chrono::milliseconds> duration;  // run until interrupted when absent
    const std::atomic<bool>* interrupted = nullptr;
    ingest::ConnectorOptions connector;
};

struct MarketCaptureSummary {
    std::string market;
    std::uint64_t records = 0;
    std::uint64_t skew_violations = 0;
    ingest::ConnectorStats stats;
};

struct CaptureRunSummary {
    std::vector<MarketCaptureSummary> markets;
    std::optional<std::string> failure;  // first terminal connector error
};

/// Runs one connector and one disk writer per configured market until the
/// duration elapses, `interrupted` becomes true, or any connector fails
/// (including a full queue). Writes <slug>.oicap, <slug>.deadletter and
/// capture_manifest.json into `opts.out`. All writers are flushed and
/// closed before returning.
[[nodiscard]] CaptureRunSummary run_capture(const ingest::RunConfig& cfg, const CaptureRunOptions& opts);

}  // namespace oiaudit::report
