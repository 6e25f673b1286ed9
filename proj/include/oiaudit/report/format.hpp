#pragma once

#include <string>
#include <string_view>

#include "oiaudit/core/amount.hpp"
#include "oiaudit/core/event.hpp"
#include "oiaudit/core/period.hpp"

namespace oiaudit::report {

/// "2023-01-31T23:59:59.999Z".
[[nodiscard]] std::string format_iso8601(EpochMs ts);

/// Parses "START..END". Each side is epoch ms, an ISO-8601 timestamp, or a
/// date; a bare end date means the end of that day. Throws
/// std::invalid_argument.
[[nodiscard]] PeriodSpec parse_period_arg(std::string_view text);

/// Rounds half-even to `digits` and inserts thousands separators.
[[nodiscard]] std::string group_thousands(Decimal v, int digits);

/// "$12,088,654,910.00" or "₿743,622.0000".
[[nodiscard]] std::string display_amount(const Amount& a);

/// "$45.66B", "$577.14K", "$0".
[[nodiscard]] std::string display_compact_usd(Decimal usd);

}  // namespace oiaudit::report
