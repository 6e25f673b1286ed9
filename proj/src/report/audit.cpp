#include "oiaudit/report/audit.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "oiaudit/core/error.hpp"
#include "oiaudit/core/ordering.hpp"
#include "oiaudit/ingest/capture.hpp"
#include "oiaudit/kernels/markets.hpp"

namespace oiaudit::report {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> expand(std::span<const fs::path> inputs) {
    std::vector<fs::path> files;
    for (const auto& p : inputs) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".oicap") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw DataError("no such capture file: " + p.string());
        }
    }
    if (files.empty()) throw DataError("no capture files found");
    return files;
}

double coverage_of(std::span<const reconcile::IntervalLedger> intervals, const PeriodSpec& period) {
    EpochMs covered = 0;
    for (const auto& l : intervals) {
        if (!l.valid) continue;
        const EpochMs lo = std::max(l.t_start + 1, period.start);
        const EpochMs hi = std::min(l.t_end, period.end);
        if (lo <= hi) covered += hi - lo + 1;
    }
    return static_cast<double>(covered) / static_cast<double>(period.end - period.start + 1);
}

}  // namespace

std::optional<Amount> MarketReport::to_usd(const Amount& a) const {
    if (a.unit() == Unit::USD) return a;
    if (!avg_price) return std::nullopt;
    return convert(a, *avg_price, Unit::USD);
}

std::optional<Decimal> MarketReport::x_tv_usd() const {
    const auto usd = to_usd(full.x_tv);
    if (!usd) return std::nullopt;
    return usd->value();
}

std::vector<std::vector<MarketEvent>> load_streams(std::span<const fs::path> inputs, std::vector<fs::path>* files) {
    const auto paths = expand(inputs);
    if (files) *files = paths;
    std::map<std::string, std::vector<MarketEvent>> by_market;
    for (const auto& p : paths) {
        auto r = ingest::replay(p);
        auto& dst = by_market[r.market.key()];
        if (!dst.empty() && dst.front().market != r.market) {
            throw DataError("capture files disagree on the contract kind of " + r.market.key());
        }
        for (auto& rec : r.records) dst.push_back(std::move(rec.event));
    }
    std::vector<std::vector<MarketEvent>> out;
    for (auto& [key, events] : by_market) {
        if (events.empty()) continue;
        out.push_back(is_ordered(events) ? std::move(events) : order_events(std::move(events)));
    }
    if (out.empty()) throw DataError("capture files hold no events");
    return out;
}

PeriodSpec data_span(std::span<const std::vector<MarketEvent>> streams) {
    EpochMs lo = 0;
    EpochMs hi = 0;
    bool first = true;
    for (const auto& s : streams) {
        if (s.empty()) continue;
        const EpochMs a = s.front().ts;
        const EpochMs b = std::max(s.back().ts, s.back().kind == EventKind::GAP ? s.back().gap_end : s.back().ts);
        lo = first ? a : std::min(lo, a);
        hi = first ? b : std::max(hi, b);
        first = false;
    }
    if (first) throw DataError("no events");
    return PeriodSpec::make(lo, std::max(hi, lo + 1));
}

AuditReport run_audit(std::span<const std::vector<MarketEvent>> streams, const AuditRequest& req, bool parallel) {
    req.audit.validate();
    AuditReport out;
    out.request = req;

    std::vector<SubPeriod> units{SubPeriod::FULL};
    for (const SubPeriod u : req.subperiods) {
        if (u != SubPeriod::FULL && std::find(units.begin(), units.end(), u) == units.end()) units.push_back(u);
    }

    const std::vector<MarketEvent>* ref = nullptr;
    if (!req.price_ref.empty()) {
        for (const auto& s : streams) {
            if (!s.empty() && s.front().market.key() == req.price_ref) ref = &s;
        }
        if (!ref) throw std::invalid_argument("price reference market " + req.price_ref + " is not among the inputs");
    }
    auto price_from = [&](const std::vector<MarketEvent>& s) -> std::optional<Decimal> {
        try {
            return stats::avg_price(s, req.period, req.weighting).round(2);
        } catch (const DataError&) {
            return std::nullopt;
        }
    };
    const std::optional<Decimal> shared_price = ref ? price_from(*ref) : std::nullopt;

    auto audits = parallel ? kernels::audit_markets(streams, req.audit, req.period, units)
                           : kernels::audit_markets_serial(streams, req.audit, req.period, units);

    for (std::size_t i = 0; i < audits.size(); ++i) {
        auto& a = audits[i];
        MarketReport m;
        m.market = a.market;
        m.events = a.events;
        m.full = a.by_unit.front().front();
        m.avg_price = ref ? shared_price : price_from(streams[i]);
        m.coverage = coverage_of(a.intervals, req.period);
        for (std::size_t u = 1; u < units.size(); ++u) {
            UnitSummary s;
            s.unit = units[u];
            s.audits = std::move(a.by_unit[u]);
            for (const auto& p : s.audits) {
                if (!p.covered) {
                    ++s.uncovered;
                } else if (!p.valid()) {
                    ++s.gapped;
                }
            }
            try {
                s.stats = stats::subperiod_stats(s.audits);
                s.stats->avg_price = m.avg_price;
            } catch (const DataError&) {
            }
            m.units.push_back(std::move(s));
        }
        if (req.audit.interval_mode.kind == reconcile::IntervalMode::Kind::PER_OI_UPDATE) {
            const auto in_period = reconcile::select_period(a.intervals, req.period);
            m.series = reconcile::tick_excess_series(in_period);
        }
        out.markets.push_back(std::move(m));
    }

    std::stable_sort(out.markets.begin(), out.markets.end(), [](const MarketReport& l, const MarketReport& r) {
        const auto lx = l.x_tv_usd();
        const auto rx = r.x_tv_usd();
        if (lx.has_value() != rx.has_value()) return lx.has_value();
        if (lx && *lx != *rx) return *lx > *rx;
        if (l.market.exchange != r.market.exchange) return l.market.exchange < r.market.exchange;
        return l.market.symbol < r.market.symbol;
    });
    return out;
}

}  // namespace oiaudit::report
