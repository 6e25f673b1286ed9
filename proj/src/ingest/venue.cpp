#include "oiaudit/ingest/venue.hpp"

#include <stdexcept>

namespace oiaudit::ingest {
namespace {

Condition parse_condition(const json& j) {
    Condition c;
    c.path = j.at("path").get<std::string>();
    if (j.contains("equals")) {
        c.op = Condition::Op::EQUALS;
        c.value = j.at("equals");
    } else if (j.contains("not_equals")) {
        c.op = Condition::Op::NOT_EQUALS;
        c.value = j.at("not_equals");
    } else if (j.contains("exists")) {
        c.op = j.at("exists").get<bool>() ? Condition::Op::EXISTS : Condition::Op::ABSENT;
    } else if (j.contains("prefix")) {
        c.op = Condition::Op::PREFIX;
        c.value = j.at("prefix");
        if (!c.value.is_string()) throw std::invalid_argument("prefix condition needs a string");
    } else if (j.contains("in")) {
        c.op = Condition::Op::IN;
        c.value = j.at("in");
        if (!c.value.is_array()) throw std::invalid_argument("'in' condition needs an array");
    } else {
        throw std::invalid_argument("condition on " + c.path + " has no operator");
    }
    return c;
}

std::vector<Condition> parse_conditions(const json& j, const char* key) {
    std::vector<Condition> out;
    if (!j.contains(key)) return out;
    for (const auto& c : j.at(key)) out.push_back(parse_condition(c));
    return out;
}

std::string as_message(const json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

MessageRule parse_rule(const json& j) {
    MessageRule r;
    r.name = j.value("name", "");
    r.channel = parse_channel(j.value("channel", "ws"));
    r.when = parse_conditions(j, "when");
    r.items = j.value("items", "");
    r.item_when = parse_conditions(j, "item_when");
    r.kind = parse_event_kind(j.value("kind", "TRADE"));
    if (j.contains("kind_rules")) {
        for (const auto& k : j.at("kind_rules")) {
            r.kind_rules.push_back({parse_conditions(k, "when"), parse_event_kind(k.at("kind").get<std::string>())});
        }
    }
    r.size = j.at("size").get<std::string>();
    r.price = j.value("price", "");
    r.ts = j.value("ts", "");
    r.ts_format = parse_ts_format(j.value("ts_format", "ms"));
    if (j.contains("size_multiplier")) r.size_multiplier = Decimal::parse(j.at("size_multiplier").get<std::string>());
    return r;
}

}  // namespace

const json* resolve_pointer(const std::string& path, const json& item, const json& root) {
    const bool from_root = !path.empty() && path.front() == '$';
    const json& base = from_root ? root : item;
    const json::json_pointer ptr(from_root ? path.substr(1) : path);
    return base.contains(ptr) ? &base.at(ptr) : nullptr;
}

bool Condition::test(const json& item, const json& root) const {
    const json* v = resolve_pointer(path, item, root);
    switch (op) {
        case Op::EXISTS: return v != nullptr;
        case Op::ABSENT: return v == nullptr;
        case Op::EQUALS: return v && *v == value;
        case Op::NOT_EQUALS: return !v || *v != value;
        case Op::PREFIX: return v && v->is_string() && v->get_ref<const std::string&>().starts_with(value.get_ref<const std::string&>());
        case Op::IN:
            if (!v) return false;
            for (const auto& x : value) {
                if (x == *v) return true;
            }
            return false;
    }
    return false;
}

TsFormat parse_ts_format(std::string_view text) {
    if (text == "s") return TsFormat::S;
    if (text == "ms") return TsFormat::MS;
    if (text == "us") return TsFormat::US;
    if (text == "ns") return TsFormat::NS;
    if (text == "iso8601") return TsFormat::ISO8601;
    throw std::invalid_argument("unknown timestamp format: " + std::string(text));
}

void VenueDescriptor::validate() const {
    const std::string who = market.key();
    if (market.exchange.empty() || market.symbol.empty()) throw std::invalid_argument("venue needs exchange and symbol");
    if (ws_endpoint.empty() && rest_oi_endpoint.empty()) throw std::invalid_argument(who + ": no endpoints");
    if (oi_poll_ms < 100) throw std::invalid_argument(who + ": oi_poll_ms must be at least 100");
    if (reconnect_backoff_ms.empty()) throw std::invalid_argument(who + ": empty reconnect backoff schedule");
    for (auto b : reconnect_backoff_ms) {
        if (b <= 0) throw std::invalid_argument(who + ": backoff steps must be positive");
    }
    if (idle_timeout_ms <= 0) throw std::invalid_argument(who + ": idle_timeout_ms must be positive");
    if (heartbeat_ms < 0 || (heartbeat_ms > 0 && heartbeat_message.empty())) {
        throw std::invalid_argument(who + ": heartbeat needs a positive interval and a message");
    }
    if (rules.empty()) throw std::invalid_argument(who + ": no message rules");
    for (const auto& r : rules) {
        if (r.kind == EventKind::GAP) throw std::invalid_argument(who + ": rules cannot emit gap markers");
        if (is_trade_like(r.kind) && r.price.empty()) throw std::invalid_argument(who + ": trade rule without price");
        if (!r.size_multiplier.is_positive()) throw std::invalid_argument(who + ": size_multiplier must be positive");
        if (r.channel != Channel::WS && r.channel != Channel::REST) {
            throw std::invalid_argument(who + ": rule channel must be ws or rest");
        }
        if (r.channel == Channel::REST && rest_oi_endpoint.empty()) {
            throw std::invalid_argument(who + ": rest rule without rest_oi_endpoint");
        }
    }
}

VenueDescriptor parse_venue(const json& j) {
    VenueDescriptor v;
    v.market.exchange = j.at("exchange").get<std::string>();
    v.market.symbol = j.at("symbol").get<std::string>();
    v.market.contract_kind = parse_contract_kind(j.at("contract_kind").get<std::string>());
    v.venue_symbol = j.value("venue_symbol", v.market.symbol);
    v.ws_endpoint = j.value("ws_endpoint", "");
    if (j.contains("subscribe")) {
        for (const auto& s : j.at("subscribe")) v.subscribe.push_back(as_message(s));
    }
    v.rest_oi_endpoint = j.value("rest_oi_endpoint", "");
    v.oi_poll_ms = j.value("oi_poll_ms", v.oi_poll_ms);
    if (j.contains("reconnect_backoff_ms")) v.reconnect_backoff_ms = j.at("reconnect_backoff_ms").get<std::vector<std::int64_t>>();
    v.idle_timeout_ms = j.value("idle_timeout_ms", v.idle_timeout_ms);
    if (j.contains("heartbeat")) {
        v.heartbeat_ms = j.at("heartbeat").at("interval_ms").get<std::int64_t>();
        v.heartbeat_message = as_message(j.at("heartbeat").at("message"));
    }
    const auto comp = j.value("compression", "none");
    if (comp == "gzip") v.compression = Compression::GZIP;
    else if (comp != "none") throw std::invalid_argument("unknown compression: " + comp);
    if (j.contains("ignore_text")) v.ignore_text = j.at("ignore_text").get<std::vector<std::string>>();
    if (j.contains("ignore")) {
        for (const auto& group : j.at("ignore")) {
            std::vector<Condition> conds;
            for (const auto& c : group) conds.push_back(parse_condition(c));
            v.ignore.push_back(std::move(conds));
        }
    }
    if (j.contains("ping_replies")) {
        for (const auto& p : j.at("ping_replies")) {
            v.ping_replies.push_back({parse_conditions(p, "when"), p.at("reply").get<std::string>()});
        }
    }
    for (const auto& r : j.at("rules")) v.rules.push_back(parse_rule(r));
    v.validate();
    return v;
}

std::vector<VenueDescriptor> parse_venues(const json& markets) {
    std::vector<VenueDescriptor> out;
    for (const auto& m : markets) {
        try {
            out.push_back(parse_venue(m));
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("bad venue descriptor: ") + e.what());
        }
    }
    return out;
}

}  // namespace oiaudit::ingest
