#include "oiaudit/core/period.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace oiaudit {

std::string_view to_string(SubPeriod s) noexcept {
    switch (s) {
        case SubPeriod::FULL: return "full";
        case SubPeriod::D1: return "1d";
        case SubPeriod::H1: return "1h";
        case SubPeriod::MIN1: return "1min";
    }
    return "?";
}

SubPeriod parse_subperiod(std::string_view text) {
    std::string s(text);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "full") return SubPeriod::FULL;
    if (s == "1d" || s == "d1") return SubPeriod::D1;
    if (s == "1h" || s == "h1") return SubPeriod::H1;
    if (s == "1min" || s == "min1" || s == "1m") return SubPeriod::MIN1;
    throw std::invalid_argument("unknown sub-period: " + std::string(text));
}

EpochMs floor_to(EpochMs ts, SubPeriod s) noexcept {
    const EpochMs unit = duration_ms(s);
    if (unit == 0) return ts;
    EpochMs q = ts / unit;
    if (ts % unit != 0 && ts < 0) --q;
    return q * unit;
}

PeriodSpec PeriodSpec::make(EpochMs start, EpochMs end, SubPeriod sub) {
    if (!(start < end)) throw std::invalid_argument("period start must precede end");
    return PeriodSpec{start, end, sub};
}

}  // namespace oiaudit
