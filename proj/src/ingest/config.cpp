#include "oiaudit/ingest/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace oiaudit::ingest {

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    const int version = j.value("schema_version", 0);
    if (version != RunConfig::kSchemaVersion) {
        throw std::invalid_argument("unsupported config schema_version " + std::to_string(version));
    }
    RunConfig cfg;
    try {
        if (j.contains("capture")) {
            const auto& c = j.at("capture");
            cfg.capture.clock_skew_ms = c.value("clock_skew_ms", cfg.capture.clock_skew_ms);
            cfg.capture.queue_capacity = c.value("queue_capacity", cfg.capture.queue_capacity);
            cfg.capture.raw_payloads = c.value("raw_payloads", cfg.capture.raw_payloads);
        }
        if (j.contains("audit")) {
            const auto& a = j.at("audit");
            cfg.audit.tau_ms = a.value("tau_ms", cfg.audit.tau_ms);
            cfg.audit.gap_factor = a.value("gap_factor", cfg.audit.gap_factor);
            const std::string mode = a.value("interval_mode", "per_oi_update");
            if (mode == "per_oi_update") {
                cfg.audit.interval_mode = reconcile::IntervalMode::per_oi_update();
            } else if (mode.starts_with("fixed:")) {
                cfg.audit.interval_mode = reconcile::IntervalMode::fixed(parse_subperiod(mode.substr(6)));
            } else {
                throw std::invalid_argument("unknown interval_mode: " + mode);
            }
        }
        cfg.markets = parse_venues(j.value("markets", json::array()));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    if (cfg.capture.clock_skew_ms < 0) throw std::invalid_argument("clock_skew_ms must be non-negative");
    if (cfg.capture.queue_capacity == 0) throw std::invalid_argument("queue_capacity must be positive");
    cfg.audit.validate();
    std::set<MarketId> seen;
    for (const auto& m : cfg.markets) {
        if (!seen.insert(m.market).second) throw std::invalid_argument("duplicate market " + m.market.key());
    }
    cfg.canonical = j.dump();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("config is not valid JSON: " + path.string());
    return parse_config(j);
}

}  // namespace oiaudit::ingest
