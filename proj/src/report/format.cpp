#include "oiaudit/report/format.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

#include "oiaudit/ingest/normalize.hpp"

namespace oiaudit::report {
namespace {

constexpr EpochMs kDayMs = 86'400'000;

struct Civil {
    std::int64_t y;
    unsigned m;
    unsigned d;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2), m, d};
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

EpochMs parse_bound(std::string_view s, bool is_end) {
    if (all_digits(s)) {
        EpochMs v = 0;
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
    }
    if (s.size() == 10) {
        const EpochMs day = ingest::parse_iso8601_ms(std::string(s) + "T00:00:00Z");
        return is_end ? day + kDayMs - 1 : day;
    }
    return ingest::parse_iso8601_ms(s);
}

}  // namespace

std::string format_iso8601(EpochMs ts) {
    const std::int64_t days = ts >= 0 ? ts / kDayMs : (ts - kDayMs + 1) / kDayMs;
    const EpochMs rem = ts - days * kDayMs;
    const Civil c = civil_from_days(days);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", c.y, c.m, c.d, rem / 3'600'000,
                       rem / 60'000 % 60, rem / 1000 % 60, rem % 1000);
}

PeriodSpec parse_period_arg(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) throw std::invalid_argument("period must look like START..END");
    try {
        return PeriodSpec::make(parse_bound(text.substr(0, sep), false), parse_bound(text.substr(sep + 2), true));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("bad period '" + std::string(text) + "': " + e.what());
    }
}

std::string group_thousands(Decimal v, int digits) {
    std::string s = v.round(digits).to_string();
    const bool neg = !s.empty() && s[0] == '-';
    if (neg) s.erase(0, 1);
    const auto dot = s.find('.');
    std::string ip = s.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : s.substr(dot + 1);
    fp.resize(static_cast<std::size_t>(digits), '0');
    std::string out;
    for (std::size_t i = 0; i < ip.size(); ++i) {
        if (i > 0 && (ip.size() - i) % 3 == 0) out += ',';
        out += ip[i];
    }
    if (digits > 0) out += "." + fp;
    return neg ? "-" + out : out;
}

std::string display_amount(const Amount& a) {
    return a.unit() == Unit::USD ? "$" + group_thousands(a.value(), 2) : "₿" + group_thousands(a.value(), 4);
}

std::string display_compact_usd(Decimal usd) {
    static constexpr struct {
        std::int64_t scale;
        const char* suffix;
    } kSteps[] = {{1'000'000'000, "B"}, {1'000'000, "M"}, {1'000, "K"}};
    for (const auto& st : kSteps) {
        if (usd.abs() >= Decimal::from_int(st.scale)) {
            return "$" + group_thousands(usd.div_int(st.scale), 2) + st.suffix;
        }
    }
    return "$" + group_thousands(usd, 2);
}

}  // namespace oiaudit::report
