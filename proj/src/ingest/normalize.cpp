#include "oiaudit/ingest/normalize.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace oiaudit::ingest {
namespace {

constexpr __int128 kScale = 100'000'000;

bool all_hold(const std::vector<Condition>& conds, const json& item, const json& root) {
    return std::all_of(conds.begin(), conds.end(), [&](const Condition& c) { return c.test(item, root); });
}

const json& require(const std::string& path, const json& item, const json& root, const char* what) {
    const json* v = resolve_pointer(path, item, root);
    if (!v || v->is_null()) throw std::invalid_argument(std::string("missing ") + what + " at " + path);
    return *v;
}

EpochMs floor_ms(Decimal ms) {
    const __int128 raw = ms.raw();
    __int128 q = raw / kScale;
    if (raw % kScale != 0 && raw < 0) --q;
    return static_cast<EpochMs>(q);
}

EpochMs to_ms(const json& v, TsFormat fmt) {
    if (fmt == TsFormat::ISO8601) {
        if (!v.is_string()) throw std::invalid_argument("iso8601 timestamp must be a string");
        return parse_iso8601_ms(v.get_ref<const std::string&>());
    }
    const Decimal d = json_decimal(v);
    switch (fmt) {
        case TsFormat::S: return floor_ms(Decimal::from_raw(d.raw() * 1000));
        case TsFormat::MS: return floor_ms(d);
        case TsFormat::US: return floor_ms(Decimal::from_raw(d.raw() / 1000));
        case TsFormat::NS: return floor_ms(Decimal::from_raw(d.raw() / 1'000'000));
        case TsFormat::ISO8601: break;
    }
    return 0;
}

int digits(std::string_view s, std::size_t pos, std::size_t n) {
    if (pos + n > s.size()) throw std::invalid_argument("truncated iso8601 timestamp");
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad iso8601 timestamp");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

// Days since 1970-01-01 in the proleptic Gregorian calendar.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string fill_template(const std::string& tpl, const json& root) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = tpl.find("${", pos);
        if (open == std::string::npos) break;
        const auto close = tpl.find('}', open);
        if (close == std::string::npos) break;
        out.append(tpl, pos, open - pos);
        const json* v = resolve_pointer(tpl.substr(open + 2, close - open - 2), root, root);
        out += v ? v->dump() : "null";
        pos = close + 1;
    }
    out.append(tpl, pos);
    return out;
}

}  // namespace

EpochMs parse_iso8601_ms(std::string_view s) {
    const int y = digits(s, 0, 4);
    const int mo = digits(s, 5, 2);
    const int d = digits(s, 8, 2);
    const int h = digits(s, 11, 2);
    const int mi = digits(s, 14, 2);
    const int se = digits(s, 17, 2);
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
        throw std::invalid_argument("bad iso8601 timestamp");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) {
        throw std::invalid_argument("iso8601 field out of range");
    }
    std::size_t pos = 19;
    int ms = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int taken = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (taken < 3) {
                ms = ms * 10 + (s[pos] - '0');
                ++taken;
            }
            ++pos;
        }
        if (taken == 0) throw std::invalid_argument("empty fractional seconds");
        while (taken++ < 3) ms *= 10;
    }
    std::int64_t offset_min = 0;
    if (pos < s.size() && s[pos] == 'Z') {
        ++pos;
    } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        const int sign = s[pos] == '-' ? -1 : 1;
        offset_min = sign * (digits(s, pos + 1, 2) * 60 + digits(s, pos + 4, 2));
        if (s[pos + 3] != ':') throw std::invalid_argument("bad iso8601 offset");
        pos += 6;
    } else {
        throw std::invalid_argument("iso8601 timestamp without zone");
    }
    if (pos != s.size()) throw std::invalid_argument("trailing characters after iso8601 timestamp");
    const std::int64_t secs = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
                              h * 3600 + mi * 60 + se - offset_min * 60;
    return secs * 1000 + ms;
}

Decimal json_decimal(const json& v) {
    if (v.is_number_integer()) return Decimal::from_int(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return Decimal::from_int(static_cast<std::int64_t>(v.get<std::uint64_t>()));
    if (v.is_number_float()) return Decimal::from_double(v.get<double>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of("eE") != std::string::npos) {
            double d = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
            if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("bad number: " + s);
            return Decimal::from_double(d);
        }
        return Decimal::parse(s);
    }
    throw std::invalid_argument("expected a number, got " + std::string(v.type_name()));
}

Normalizer::Normalizer(VenueDescriptor venue) : venue_(std::move(venue)) { venue_.validate(); }

NormalizeResult Normalizer::normalize(std::string_view payload, Channel channel, EpochMs recv_ts) const {
    NormalizeResult out;
    if (std::find(venue_.ignore_text.begin(), venue_.ignore_text.end(), payload) != venue_.ignore_text.end()) {
        return out;
    }
    const json root = json::parse(payload, nullptr, false);
    if (root.is_discarded()) {
        out.outcome = NormalizeResult::Outcome::DEAD_LETTER;
        out.reason = "not valid JSON";
        return out;
    }
    for (const auto& p : venue_.ping_replies) {
        if (all_hold(p.when, root, root)) {
            out.outcome = NormalizeResult::Outcome::REPLY;
            out.reply = fill_template(p.reply, root);
            return out;
        }
    }
    for (const auto& group : venue_.ignore) {
        if (all_hold(group, root, root)) return out;
    }

    const MarketId& m = venue_.market;
    for (const auto& rule : venue_.rules) {
        if (rule.channel != channel || !all_hold(rule.when, root, root)) continue;
        try {
            std::vector<const json*> items;
            if (rule.items.empty()) {
                items.push_back(&root);
            } else {
                const json& node = require(rule.items, root, root, "items");
                if (node.is_array()) {
                    for (const auto& x : node) items.push_back(&x);
                } else if (node.is_object()) {
                    items.push_back(&node);
                } else {
                    throw std::invalid_argument("items is neither array nor object");
                }
            }
            for (const json* item : items) {
                if (!all_hold(rule.item_when, *item, root)) continue;
                MarketEvent e;
                e.market = m;
                e.kind = rule.kind;
                for (const auto& k : rule.kind_rules) {
                    if (all_hold(k.when, *item, root)) {
                        e.kind = k.kind;
                        break;
                    }
                }
                const Decimal size = mul(json_decimal(require(rule.size, *item, root, "size")), rule.size_multiplier);
                if (size.is_negative()) throw std::invalid_argument("negative size");
                e.size_or_value = Amount(size, m.native_unit());
                if (!rule.price.empty() && is_trade_like(e.kind)) {
                    e.price = json_decimal(require(rule.price, *item, root, "price"));
                }
                if (rule.ts.empty()) {
                    e.ts = recv_ts;
                    e.ts_source = TsSource::LOCAL;
                } else {
                    e.ts = to_ms(require(rule.ts, *item, root, "timestamp"), rule.ts_format);
                }
                validate(e);
                out.events.push_back(std::move(e));
            }
        } catch (const std::exception& ex) {
            out.events.clear();
            out.outcome = NormalizeResult::Outcome::DEAD_LETTER;
            out.reason = (rule.name.empty() ? std::string("rule") : rule.name) + ": " + ex.what();
            return out;
        }
        out.outcome = out.events.empty() ? NormalizeResult::Outcome::IGNORED : NormalizeResult::Outcome::EVENTS;
        return out;
    }
    out.outcome = NormalizeResult::Outcome::DEAD_LETTER;
    out.reason = "no rule matches";
    return out;
}

}  // namespace oiaudit::ingest
