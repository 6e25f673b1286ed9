#include "oiaudit/report/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "oiaudit/core/error.hpp"
#include "oiaudit/ingest/capture.hpp"
#include "oiaudit/report/audit.hpp"
#include "oiaudit/report/tables.hpp"

namespace oiaudit::report {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kLedgerHeader =
    "step\tts\tseq\tkind\tsize\tprice\tbuyer\tseller\tbuyer_pos\tseller_pos\teffect\toi_delta\toi_after\t"
    "long_total\tshort_total\treported\treported_ts";
constexpr std::string_view kOiHeader = "ts\tseq\ttrue_oi\treported_oi";

void write_stream(const fs::path& dir, const std::vector<MarketEvent>& events, const MarketId& market) {
    fs::create_directories(dir);
    const fs::path file = dir / (market_slug(market) + ".oicap");
    fs::remove(file);
    ingest::CaptureWriter w(file, market);
    for (const auto& e : events) w.append({e.ts, e, ingest::Channel::SIM, {}});
    w.flush();
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    while (true) {
        const auto t = line.find('\t', pos);
        f.push_back(line.substr(pos, t == std::string_view::npos ? std::string_view::npos : t - pos));
        if (t == std::string_view::npos) break;
        pos = t + 1;
    }
    return f;
}

std::int64_t to_int(std::string_view s) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("bad integer '" + std::string(s) + "'");
    return v;
}

sim::Effect parse_effect(std::string_view s) {
    for (auto e : {sim::Effect::OPEN, sim::Effect::TRANSFER, sim::Effect::CLOSE}) {
        if (s == sim::to_string(e)) return e;
    }
    throw std::invalid_argument("bad effect '" + std::string(s) + "'");
}

template <class F>
void read_table(const fs::path& path, std::string_view header, std::size_t columns, F on_row) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != header) throw DataError(path.string() + ": unexpected header");
    std::uint64_t offset = line.size() + 1;
    while (std::getline(in, line)) {
        const auto f = split_tabs(line);
        try {
            if (f.size() != columns) throw std::invalid_argument("wrong column count");
            on_row(f);
        } catch (const std::invalid_argument& e) {
            throw DataError(path.string() + ": " + e.what(), offset);
        }
        offset += line.size() + 1;
    }
}

std::vector<MarketEvent> single_stream(const fs::path& dir) {
    const fs::path inputs[] = {dir};
    auto streams = load_streams(inputs);
    if (streams.size() != 1) throw DataError(dir.string() + " should hold exactly one market");
    return std::move(streams.front());
}

Decimal trade_volume(const std::vector<MarketEvent>& s) {
    Decimal v;
    for (const auto& e : s) {
        if (is_trade_like(e.kind)) v += e.size_or_value.value();
    }
    return v;
}

bool zero_everywhere(const MarketReport& m) {
    if (!m.full.x_tv.is_zero()) return false;
    for (const auto& u : m.units) {
        for (const auto& a : u.audits) {
            if (a.valid() && !a.x_tv.is_zero()) return false;
        }
    }
    return true;
}

std::string excess_profile(const MarketReport& m) {
    std::string s = fmt::format("FULL X_TV = {}", m.full.x_tv.value().to_string());
    for (const auto& u : m.units) {
        if (!u.stats) continue;
        s += fmt::format("; {}: {}/{} sub-periods with excess", to_string(u.unit), u.stats->n_excess, u.stats->n_total);
    }
    return s;
}

}  // namespace

void write_truth_ledger(const fs::path& path, const sim::TruthLedger& truth) {
    auto out = open_out(path);
    out << kLedgerHeader << '\n';
    for (const auto& r : truth.rows) {
        out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.step, r.ts, r.seq,
                           to_string(r.kind), r.size.to_string(), r.price.to_string(), r.buyer, r.seller,
                           r.buyer_pos.to_string(), r.seller_pos.to_string(), sim::to_string(r.effect),
                           r.oi_delta.to_string(), r.oi_after.to_string(), r.long_total.to_string(),
                           r.short_total.to_string(), r.reported ? 1 : 0, r.reported_ts);
    }
}

void write_oi_reports(const fs::path& path, const sim::TruthLedger& truth) {
    auto out = open_out(path);
    out << kOiHeader << '\n';
    for (const auto& r : truth.oi_reports) {
        out << fmt::format("{}\t{}\t{}\t{}\n", r.ts, r.seq, r.true_oi.to_string(), r.reported_oi.to_string());
    }
}

void write_simulation(const SimulationPaths& out, const ScenarioFile& scenario, const sim::Scenario& result) {
    fs::create_directories(out.root);
    write_stream(out.true_dir(), result.true_stream, scenario.spec.market);
    write_stream(out.reported_dir(), result.reported_stream, scenario.spec.market);
    write_truth_ledger(out.ledger(), result.truth);
    write_oi_reports(out.oi_reports(), result.truth);
    open_out(out.scenario()) << scenario.source.dump(2) << '\n';
}

sim::TruthLedger read_truth(const SimulationPaths& in) {
    sim::TruthLedger t;
    read_table(in.ledger(), kLedgerHeader, 17, [&](const std::vector<std::string_view>& f) {
        sim::LedgerRow r;
        r.step = to_int(f[0]);
        r.ts = to_int(f[1]);
        r.seq = static_cast<std::uint64_t>(to_int(f[2]));
        r.kind = parse_event_kind(f[3]);
        r.size = Decimal::parse(f[4]);
        r.price = Decimal::parse(f[5]);
        r.buyer = to_int(f[6]);
        r.seller = to_int(f[7]);
        r.buyer_pos = Decimal::parse(f[8]);
        r.seller_pos = Decimal::parse(f[9]);
        r.effect = parse_effect(f[10]);
        r.oi_delta = Decimal::parse(f[11]);
        r.oi_after = Decimal::parse(f[12]);
        r.long_total = Decimal::parse(f[13]);
        r.short_total = Decimal::parse(f[14]);
        r.reported = to_int(f[15]) != 0;
        r.reported_ts = to_int(f[16]);
        t.n_traders = std::max({t.n_traders, r.buyer + 1, r.seller + 1});
        t.rows.push_back(r);
    });
    read_table(in.oi_reports(), kOiHeader, 4, [&](const std::vector<std::string_view>& f) {
        t.oi_reports.push_back({to_int(f[0]), static_cast<std::uint64_t>(to_int(f[1])), Decimal::parse(f[2]),
                                Decimal::parse(f[3])});
    });
    return t;
}

bool VerifyResult::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.ok; });
}

std::string VerifyResult::text() const {
    std::string out;
    for (const auto& c : checks) {
        out += fmt::format("[{}] {}{}\n", c.ok ? "ok" : "FAIL", c.name, c.detail.empty() ? "" : ": " + c.detail);
    }
    out += "signature: " + signature + "\n";
    return out;
}

VerifyResult verify_simulation(const SimulationPaths& in) {
    const ScenarioFile scenario = load_scenario(in.scenario());
    const sim::ReportingPolicy& policy = scenario.spec.policy;
    const auto truth_stream = single_stream(in.true_dir());
    const auto reported_stream = single_stream(in.reported_dir());
    const sim::TruthLedger truth = read_truth(in);
    if (truth.oi_reports.size() < 2) throw DataError("truth ledger has fewer than two OI reports");

    VerifyResult res;
    auto check = [&](std::string name, bool ok, std::string detail = {}) {
        res.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const std::vector<MarketEvent> streams[] = {truth_stream, reported_stream};
    AuditRequest req;
    req.period = data_span(streams);
    req.subperiods = {SubPeriod::D1, SubPeriod::H1, SubPeriod::MIN1};
    req.audit.tau_ms = scenario.tau_ms;
    const MarketReport t = run_audit(std::span(streams, 1), req).markets.front();
    const MarketReport r = run_audit(std::span(streams + 1, 1), req).markets.front();

    // Ledger-side quantities, computed without the auditor.
    Decimal ledger_volume;
    Decimal reported_ledger_volume;
    for (const auto& row : truth.rows) {
        ledger_volume += row.size;
        if (row.reported) reported_ledger_volume += row.size;
    }
    bool conserved = true;
    for (const auto& row : truth.rows) conserved = conserved && row.long_total == row.short_total && row.long_total == row.oi_after;

    check("longs equal shorts equal OI at every step", conserved);
    check("true stream volume matches truth ledger", trade_volume(truth_stream) == ledger_volume,
          fmt::format("{} vs {}", trade_volume(truth_stream).to_string(), ledger_volume.to_string()));
    check("reported stream volume matches reported ledger rows", trade_volume(reported_stream) == reported_ledger_volume,
          fmt::format("{} vs {}", trade_volume(reported_stream).to_string(), reported_ledger_volume.to_string()));
    check("true stream reconciles at every resolution", zero_everywhere(t), excess_profile(t));

    reconcile::AuditConfig strict;
    strict.tau_ms = 0;
    std::size_t strict_excess = 0;
    for (const auto& l : reconcile::build_intervals(truth_stream, strict)) strict_excess += l.excess.is_zero() ? 0 : 1;
    check("true stream reconciles per OI report without latency allowance", strict_excess == 0,
          fmt::format("{} intervals with excess", strict_excess));

    bool monotone = true;
    for (const auto* m : {&t, &r}) {
        for (const auto& u : m->units) {
            if (!m->full.valid() || u.gapped + u.uncovered > 0) continue;
            Decimal sum;
            for (const auto& a : u.audits) sum += a.x_tv.value();
            monotone = monotone && m->full.x_tv.value() <= sum;
        }
    }
    check("coarse X_TV is at most the sum of finer X_TV", monotone);

    switch (policy.kind) {
        case sim::ReportingPolicy::Kind::HONEST:
            check("reported stream equals true stream", reported_stream == truth_stream);
            check("reported stream reconciles at every resolution", zero_everywhere(r), excess_profile(r));
            res.signature = "consistent: " + excess_profile(r);
            break;
        case sim::ReportingPolicy::Kind::DELAY:
            if (policy.delay_ms <= scenario.tau_ms) {
                check("delay within tau reconciles at every resolution", zero_everywhere(r), excess_profile(r));
                res.signature = "delay absorbed by tau: " + excess_profile(r);
            } else {
                check("full period reconciles (eventual consistency)", r.full.x_tv.is_zero(), excess_profile(r));
                res.signature = "eventual consistency on higher timeframes: " + excess_profile(r);
            }
            break;
        case sim::ReportingPolicy::Kind::HIDE: {
            // X_TV over the whole span from the reported OI path and the
            // trades the ledger says were reported inside the audited span.
            const EpochMs lo = truth.oi_reports.front().ts;
            const EpochMs hi = truth.oi_reports.back().ts + scenario.tau_ms;
            Decimal o_tv;
            for (std::size_t i = 1; i < truth.oi_reports.size(); ++i) {
                o_tv += (truth.oi_reports[i].reported_oi - truth.oi_reports[i - 1].reported_oi).abs();
            }
            Decimal v_t;
            Decimal hidden;
            for (const auto& row : truth.rows) {
                if (row.reported && row.reported_ts > lo && row.reported_ts <= hi) v_t += row.size;
                if (!row.reported) hidden += row.size;
            }
            const Decimal expect = o_tv > v_t ? o_tv - v_t : Decimal{};
            check("full-period X_TV equals ledger O_TV minus reported volume", r.full.x_tv.value() == expect,
                  fmt::format("auditor {} vs ledger {}", r.full.x_tv.value().to_string(), expect.to_string()));
            res.signature = fmt::format("never-reported volume {}: {}", hidden.to_string(), excess_profile(r));
            break;
        }
        case sim::ReportingPolicy::Kind::FABRICATE_OI: {
            bool bounded = true;
            for (const auto& rep : truth.oi_reports) {
                bounded = bounded && (rep.reported_oi - rep.true_oi).abs() <= policy.amplitude && !rep.reported_oi.is_negative();
            }
            check("fabricated OI stays within amplitude", bounded);
            check("volume untouched by OI fabrication", trade_volume(reported_stream) == trade_volume(truth_stream));
            res.signature = "fabricated open interest: " + excess_profile(r);
            break;
        }
    }
    return res;
}

}  // namespace oiaudit::report
