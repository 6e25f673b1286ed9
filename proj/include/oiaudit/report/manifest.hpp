#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oiaudit/ingest/venue.hpp"
#include "oiaudit/report/audit.hpp"

namespace oiaudit::report {

inline constexpr std::string_view kVersion = OIAUDIT_VERSION;

struct InputDigest {
    std::string name;  // file name only, so manifests do not depend on where inputs live
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// Everything that determines an audit's output. Equal manifests imply
/// byte-identical reports.
struct RunManifest {
    std::string version{kVersion};
    std::string config_sha256;
    ingest::json parameters;  // effective request; hashed into config_sha256
    std::vector<std::string> markets;
    std::vector<std::pair<std::string, double>> coverage;
    std::vector<InputDigest> inputs;
};

[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Canonical JSON of the audit parameters in `req`. `config_canonical`
/// (a run configuration's normalized text) is folded in when non-empty.
[[nodiscard]] ingest::json request_json(const AuditRequest& req, const std::string& config_canonical = {});

[[nodiscard]] RunManifest make_manifest(const AuditReport& report, std::span<const std::filesystem::path> inputs,
                                        const std::string& config_canonical = {});

[[nodiscard]] ingest::json to_json(const RunManifest& m);

}  // namespace oiaudit::report
