#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oiaudit/ingest/venue.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::ingest {

struct CaptureSettings {
    std::int64_t clock_skew_ms = 5000;
    std::size_t queue_capacity = 1 << 20;
    bool raw_payloads = true;
};

/// Contents of a run configuration file (schema_version 1).
struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    CaptureSettings capture;
    reconcile::AuditConfig audit;
    std::vector<VenueDescriptor> markets;
    std::string canonical;  // normalized JSON text, used for hashing
};

/// Throws std::invalid_argument on schema or value errors.
[[nodiscard]] RunConfig parse_config(const json& j);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

}  // namespace oiaudit::ingest
