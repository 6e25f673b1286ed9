#include "oiaudit/kernels/markets.hpp"

#include <exception>
#include <stdexcept>

#include "oiaudit/core/error.hpp"
#include "oiaudit/kernels/subperiods.hpp"

namespace oiaudit::kernels {
namespace {

template <class Bucketing>
MarketAudit audit_one(const std::vector<MarketEvent>& events, const reconcile::AuditConfig& cfg,
                      const PeriodSpec& period, std::span<const SubPeriod> units, Bucketing bucketing) {
    if (events.empty()) throw std::invalid_argument("empty market stream");
    MarketAudit out;
    out.market = events.front().market;
    out.events = events.size();
    try {
        out.intervals = reconcile::build_intervals(events, cfg);
    } catch (const DataError& e) {
        throw DataError(out.market.key() + ": " + e.what());
    }
    for (const SubPeriod u : units) out.by_unit.push_back(bucketing(out.market, out.intervals, period, u));
    return out;
}

}  // namespace

std::vector<MarketAudit> audit_markets(std::span<const std::vector<MarketEvent>> streams,
                                       const reconcile::AuditConfig& cfg, const PeriodSpec& period,
                                       std::span<const SubPeriod> units) {
    std::vector<MarketAudit> out(streams.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(streams.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            out[static_cast<std::size_t>(k)] =
                audit_one(streams[static_cast<std::size_t>(k)], cfg, period, units, subperiod_audits);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<MarketAudit> audit_markets_serial(std::span<const std::vector<MarketEvent>> streams,
                                              const reconcile::AuditConfig& cfg, const PeriodSpec& period,
                                              std::span<const SubPeriod> units) {
    std::vector<MarketAudit> out;
    out.reserve(streams.size());
    for (const auto& s : streams) out.push_back(audit_one(s, cfg, period, units, subperiod_audits_serial));
    return out;
}

}  // namespace oiaudit::kernels
