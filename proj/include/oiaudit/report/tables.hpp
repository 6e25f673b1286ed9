#pragma once

#include <string>

#include "oiaudit/report/audit.hpp"

namespace oiaudit::report {

/// Period table, one row per market: O_TV, V_T and X_TV in native units
/// and in USD at the row's average price.
[[nodiscard]] std::string period_table_text(const AuditReport& r);
[[nodiscard]] std::string period_table_tsv(const AuditReport& r);

/// Sub-period table: P(X_TV > 0) and E[X_TV | X_TV > 0] per granularity.
[[nodiscard]] std::string subperiod_table_text(const AuditReport& r);
[[nodiscard]] std::string subperiod_table_tsv(const AuditReport& r);

/// Plot-ready tick series: ts, iso time, excess (native), last price, valid.
[[nodiscard]] std::string series_tsv(const MarketReport& m);

/// File-system friendly "<exchange>_<symbol>".
[[nodiscard]] std::string market_slug(const MarketId& m);

}  // namespace oiaudit::report
