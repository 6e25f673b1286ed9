#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oiaudit/core/event.hpp"
#include "oiaudit/core/period.hpp"
#include "oiaudit/reconcile/aggregate.hpp"
#include "oiaudit/reconcile/intervals.hpp"
#include "oiaudit/reconcile/series.hpp"
#include "oiaudit/stats/stats.hpp"

namespace oiaudit::report {

struct AuditRequest {
    PeriodSpec period;
    // Sub-period granularities for the sub-period table; FULL entries are
    // ignored there (the period table always covers FULL).
    std::vector<SubPeriod> subperiods{SubPeriod::D1, SubPeriod::H1, SubPeriod::MIN1};
    reconcile::AuditConfig audit;
    stats::PriceWeighting weighting = stats::PriceWeighting::UNWEIGHTED;
    // Market key ("EXCHANGE:SYMBOL") whose trades give every row's average
    // price. Empty: each market uses its own trades.
    std::string price_ref;
};

struct UnitSummary {
    SubPeriod unit = SubPeriod::D1;
    std::vector<reconcile::PeriodAudit> audits;
    std::optional<stats::SubPeriodStats> stats;  // absent when no sub-period is valid
    std::size_t gapped = 0;                      // covered, but overlapping a feed gap
    std::size_t uncovered = 0;                   // outside the audited span
};

struct MarketReport {
    MarketId market;
    std::size_t events = 0;
    reconcile::PeriodAudit full;
    std::vector<UnitSummary> units;
    // Rounded to cents; absent when the reference market has no trades.
    std::optional<Decimal> avg_price;
    // Intervals ending inside the period (PER_OI_UPDATE mode only).
    std::vector<reconcile::TickExcessPoint> series;
    // Share of the period's milliseconds covered by valid intervals.
    double coverage = 0;

    /// x_tv of the period in USD; absent for coin markets without a price.
    [[nodiscard]] std::optional<Decimal> x_tv_usd() const;
    /// Converts a native amount to USD; absent without a price basis.
    [[nodiscard]] std::optional<Amount> to_usd(const Amount& a) const;
};

struct AuditReport {
    AuditRequest request;
    std::vector<MarketReport> markets;  // table order
};

/// Loads capture files, merging files of the same market, and returns one
/// (ts, seq)-ordered stream per market sorted by market key. Directories
/// contribute their *.oicap files.
[[nodiscard]] std::vector<std::vector<MarketEvent>> load_streams(std::span<const std::filesystem::path> inputs,
                                                                 std::vector<std::filesystem::path>* files = nullptr);

/// Smallest closed range containing every event.
[[nodiscard]] PeriodSpec data_span(std::span<const std::vector<MarketEvent>> streams);

/// Full audit pipeline. `parallel` selects the OpenMP kernels or their
/// serial references. Rows are sorted by X_TV in USD (descending), then
/// exchange and symbol. Throws DataError for unusable streams and
/// std::invalid_argument for a bad request.
[[nodiscard]] AuditReport run_audit(std::span<const std::vector<MarketEvent>> streams, const AuditRequest& req,
                                    bool parallel = true);

}  // namespace oiaudit::report
