#include "oiaudit/report/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "oiaudit/core/error.hpp"
#include "oiaudit/report/format.hpp"

namespace oiaudit::report {
namespace {

using ingest::json;

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("sha256 init failed");
        }
    }
    void update(const void* p, std::size_t n) { EVP_DigestUpdate(ctx_.get(), p, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        std::string out;
        for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string interval_mode_text(const reconcile::IntervalMode& m) {
    if (m.kind == reconcile::IntervalMode::Kind::PER_OI_UPDATE) return "per_oi_update";
    return "fixed:" + std::string(to_string(m.unit));
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

json request_json(const AuditRequest& req, const std::string& config_canonical) {
    json units = json::array();
    for (const SubPeriod u : req.subperiods) units.push_back(std::string(to_string(u)));
    json j = {
        {"period", {{"start", format_iso8601(req.period.start)}, {"end", format_iso8601(req.period.end)}}},
        {"subperiods", units},
        {"tau_ms", req.audit.tau_ms},
        {"interval_mode", interval_mode_text(req.audit.interval_mode)},
        {"gap_factor", req.audit.gap_factor},
        {"price_weighting", req.weighting == stats::PriceWeighting::VOLUME ? "volume" : "unweighted"},
        {"price_ref", req.price_ref},
    };
    if (!config_canonical.empty()) j["config"] = json::parse(config_canonical);
    return j;
}

RunManifest make_manifest(const AuditReport& report, std::span<const std::filesystem::path> inputs,
                          const std::string& config_canonical) {
    RunManifest m;
    m.parameters = request_json(report.request, config_canonical);
    m.config_sha256 = sha256_hex(m.parameters.dump());
    for (const auto& r : report.markets) {
        m.markets.push_back(r.market.key());
        m.coverage.emplace_back(r.market.key(), r.coverage);
    }
    for (const auto& p : inputs) {
        m.inputs.push_back({p.filename().string(), sha256_file(p), std::filesystem::file_size(p)});
    }
    return m;
}

json to_json(const RunManifest& m) {
    json coverage = json::object();
    for (const auto& [k, v] : m.coverage) coverage[k] = std::stod(fmt::format("{:.6f}", v));
    json inputs = json::array();
    for (const auto& d : m.inputs) inputs.push_back({{"file", d.name}, {"sha256", d.sha256}, {"bytes", d.bytes}});
    return {
        {"version", m.version},       {"config_sha256", m.config_sha256}, {"parameters", m.parameters},
        {"markets", m.markets},       {"coverage", coverage},             {"inputs", inputs},
    };
}

}  // namespace oiaudit::report
