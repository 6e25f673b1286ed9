#include "oiaudit/report/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "oiaudit/ingest/normalize.hpp"
#include "oiaudit/reconcile/intervals.hpp"

namespace oiaudit::report {
namespace {

using ingest::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw std::invalid_argument(where + ": unknown key '" + k + "'");
    }
}

EpochMs json_ts(const json& v) {
    if (v.is_string()) return ingest::parse_iso8601_ms(v.get_ref<const std::string&>());
    return v.get<EpochMs>();
}

sim::ReportingPolicy parse_policy(const json& j) {
    only_keys(j, {"kind", "delay_ms", "fraction", "amplitude", "targets"}, "policy");
    const auto kind = j.at("kind").get<std::string>();
    sim::ReportingPolicy p;
    if (kind == "HONEST") {
        p = sim::ReportingPolicy::honest();
    } else if (kind == "DELAY") {
        p = sim::ReportingPolicy::delay(j.at("delay_ms").get<EpochMs>());
    } else if (kind == "HIDE") {
        p = sim::ReportingPolicy::hide(j.at("fraction").get<double>());
    } else if (kind == "FABRICATE_OI") {
        p = sim::ReportingPolicy::fabricate(ingest::json_decimal(j.at("amplitude")));
    } else {
        throw std::invalid_argument("unknown policy kind '" + kind + "'");
    }
    if (j.contains("targets")) {
        p.targets.clear();
        for (const auto& t : j.at("targets")) p.targets.push_back(parse_event_kind(t.get<std::string>()));
    }
    return p;
}

}  // namespace

ScenarioFile parse_scenario(const json& j) {
    only_keys(j,
              {"market", "n_traders", "n_steps", "rng_seed", "trade_size", "oi_report_cadence_ms", "start_ts",
               "mean_gap_ms", "min_gap_ms", "mix", "liquidation_share", "block_share", "burst", "start_price", "tick",
               "policy", "audit"},
              "scenario");
    ScenarioFile f;
    f.source = j;
    auto& s = f.spec;
    try {
        if (j.contains("market")) {
            const auto& m = j.at("market");
            only_keys(m, {"exchange", "symbol", "contract_kind"}, "market");
            s.market.exchange = m.at("exchange").get<std::string>();
            s.market.symbol = m.at("symbol").get<std::string>();
            s.market.contract_kind = parse_contract_kind(m.at("contract_kind").get<std::string>());
        }
        s.n_traders = j.value("n_traders", s.n_traders);
        s.n_steps = j.value("n_steps", s.n_steps);
        s.rng_seed = j.value("rng_seed", s.rng_seed);
        if (j.contains("trade_size")) {
            const auto& t = j.at("trade_size");
            only_keys(t, {"min", "max", "lot"}, "trade_size");
            if (t.contains("min")) s.trade_size.min = ingest::json_decimal(t.at("min"));
            if (t.contains("max")) s.trade_size.max = ingest::json_decimal(t.at("max"));
            if (t.contains("lot")) s.trade_size.lot = ingest::json_decimal(t.at("lot"));
        }
        s.oi_report_cadence_ms = j.value("oi_report_cadence_ms", s.oi_report_cadence_ms);
        if (j.contains("start_ts")) s.start_ts = json_ts(j.at("start_ts"));
        s.mean_gap_ms = j.value("mean_gap_ms", s.mean_gap_ms);
        s.min_gap_ms = j.value("min_gap_ms", s.min_gap_ms);
        if (j.contains("mix")) {
            const auto& m = j.at("mix");
            only_keys(m, {"open", "transfer", "close"}, "mix");
            s.mix.open = m.value("open", s.mix.open);
            s.mix.transfer = m.value("transfer", s.mix.transfer);
            s.mix.close = m.value("close", s.mix.close);
        }
        s.liquidation_share = j.value("liquidation_share", s.liquidation_share);
        s.block_share = j.value("block_share", s.block_share);
        if (j.contains("burst")) {
            const auto& b = j.at("burst");
            only_keys(b, {"start_step", "length"}, "burst");
            s.burst = sim::UnwindBurst{b.at("start_step").get<std::int64_t>(), b.at("length").get<std::int64_t>()};
        }
        if (j.contains("start_price")) s.start_price = ingest::json_decimal(j.at("start_price"));
        if (j.contains("tick")) s.tick = ingest::json_decimal(j.at("tick"));
        if (j.contains("policy")) s.policy = parse_policy(j.at("policy"));
        if (j.contains("audit")) {
            only_keys(j.at("audit"), {"tau_ms"}, "audit");
            f.tau_ms = j.at("audit").value("tau_ms", f.tau_ms);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    s.validate();
    if (f.tau_ms < 0 || f.tau_ms > reconcile::AuditConfig::kMaxTauMs) throw std::invalid_argument("scenario: tau_ms out of range");
    return f;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return parse_scenario(j);
}

}  // namespace oiaudit::report
