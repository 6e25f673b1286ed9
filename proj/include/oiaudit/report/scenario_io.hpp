#pragma once

#include <cstdint>
#include <filesystem>

#include "oiaudit/ingest/venue.hpp"
#include "oiaudit/simulate/scenario.hpp"

namespace oiaudit::report {

/// A scenario file: the generator spec plus the audit latency that `verify`
/// should apply to its output.
struct ScenarioFile {
    sim::ScenarioSpec spec;
    std::int64_t tau_ms = 1;
    ingest::json source;
};

/// Unknown keys are rejected so that typos do not silently fall back to
/// defaults. Throws std::invalid_argument.
[[nodiscard]] ScenarioFile parse_scenario(const ingest::json& j);
[[nodiscard]] ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace oiaudit::report
