#include "oiaudit/report/tables.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "oiaudit/report/format.hpp"

namespace oiaudit::report {
namespace {

using Row = std::vector<std::string>;

// Display width in code points; amounts contain the multi-byte "₿".
std::size_t width(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string render(const Row& header, const std::vector<Row>& rows, std::size_t left_cols) {
    std::vector<std::size_t> w(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        w[c] = width(header[c]);
        for (const auto& r : rows) w[c] = std::max(w[c], width(r[c]));
    }
    std::string out;
    auto line = [&](const Row& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string pad(w[c] - width(r[c]), ' ');
            if (c > 0) out += "  ";
            out += c < left_cols ? r[c] + pad : pad + r[c];
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto x : w) total += x;
    out += std::string(total + 2 * (w.size() - 1), '-') + '\n';
    for (const auto& r : rows) line(r);
    return out;
}

std::string tsv(const Row& header, const std::vector<Row>& rows) {
    std::string out = fmt::format("{}\n", fmt::join(header, "\t"));
    for (const auto& r : rows) out += fmt::format("{}\n", fmt::join(r, "\t"));
    return out;
}

// "₿743,622.0000 ($15.34B)" for coin amounts, "$5,517,835,680.00" for USD.
std::string paired(const MarketReport& m, const Amount& a) {
    if (a.unit() == Unit::USD) return display_amount(a);
    const auto usd = m.to_usd(a);
    return display_amount(a) + (usd ? " (" + display_compact_usd(usd->value()) + ")" : " (n/a)");
}

std::string exact_usd(const MarketReport& m, const Amount& a) {
    const auto usd = m.to_usd(a);
    return usd ? usd->value().to_string() : "";
}

std::string price_text(const MarketReport& m) {
    return m.avg_price ? "$" + group_thousands(*m.avg_price, 2) : "n/a";
}

std::string percent(double p) { return fmt::format("{:.1f}%", 100.0 * p); }

std::vector<SubPeriod> units_of(const AuditReport& r) {
    std::vector<SubPeriod> units;
    if (!r.markets.empty()) {
        for (const auto& u : r.markets.front().units) units.push_back(u.unit);
    }
    return units;
}

}  // namespace

std::string market_slug(const MarketId& m) {
    std::string s = m.exchange + "_" + m.symbol;
    for (char& c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) c = '_';
    }
    return s;
}

std::string period_table_text(const AuditReport& r) {
    const Row header{"Exchange", "Symbol", "O_TV", "V_T", "X_TV", "Avg price", "Coverage"};
    std::vector<Row> rows;
    for (const auto& m : r.markets) {
        rows.push_back({m.market.exchange, m.market.symbol, paired(m, m.full.o_tv), paired(m, m.full.v_t),
                        paired(m, m.full.x_tv), price_text(m), percent(m.coverage)});
    }
    return fmt::format("Period {} .. {} (inclusive), tau = {} ms\n\n", format_iso8601(r.request.period.start),
                       format_iso8601(r.request.period.end), r.request.audit.tau_ms) +
           render(header, rows, 2);
}

std::string period_table_tsv(const AuditReport& r) {
    const Row header{"exchange",  "symbol",    "contract_kind", "unit",      "o_tv",     "v_t",
                     "x_tv",      "avg_price", "o_tv_usd",      "v_t_usd",   "x_tv_usd", "intervals",
                     "invalid_intervals", "coverage"};
    std::vector<Row> rows;
    for (const auto& m : r.markets) {
        rows.push_back({m.market.exchange, m.market.symbol, std::string(to_string(m.market.contract_kind)),
                        std::string(to_string(m.market.native_unit())), m.full.o_tv.value().to_string(),
                        m.full.v_t.value().to_string(), m.full.x_tv.value().to_string(),
                        m.avg_price ? m.avg_price->to_string() : "", exact_usd(m, m.full.o_tv),
                        exact_usd(m, m.full.v_t), exact_usd(m, m.full.x_tv), std::to_string(m.full.intervals),
                        std::to_string(m.full.invalid_intervals), fmt::format("{:.6f}", m.coverage)});
    }
    return tsv(header, rows);
}

std::string subperiod_table_text(const AuditReport& r) {
    const auto units = units_of(r);
    Row header{"Exchange", "Symbol"};
    for (const SubPeriod u : units) {
        header.push_back(fmt::format("P_{}(X_TV>0)", to_string(u)));
        header.push_back(fmt::format("E_{}[X_TV|X_TV>0]", to_string(u)));
        header.push_back(fmt::format("n_{}", to_string(u)));
    }
    std::vector<const MarketReport*> order;
    for (const auto& m : r.markets) order.push_back(&m);
    // Coarsest granularity first, as in the period table: larger P first.
    std::stable_sort(order.begin(), order.end(), [&](const MarketReport* a, const MarketReport* b) {
        for (std::size_t k = 0; k < units.size(); ++k) {
            const double pa = a->units[k].stats ? a->units[k].stats->p_excess() : -1.0;
            const double pb = b->units[k].stats ? b->units[k].stats->p_excess() : -1.0;
            if (pa != pb) return pa > pb;
        }
        return false;
    });
    std::vector<Row> rows;
    for (const auto* m : order) {
        Row row{m->market.exchange, m->market.symbol};
        for (const auto& u : m->units) {
            if (!u.stats) {
                row.insert(row.end(), {"n/a", "n/a", "0"});
                continue;
            }
            row.push_back(percent(u.stats->p_excess()));
            row.push_back(paired(*m, u.stats->cond_mean_excess()));
            row.push_back(std::to_string(u.stats->n_total));
        }
        rows.push_back(std::move(row));
    }
    std::string head = fmt::format("Period {} .. {} (inclusive); n = valid sub-periods\n\n",
                                   format_iso8601(r.request.period.start), format_iso8601(r.request.period.end));
    return head + render(header, rows, 2);
}

std::string subperiod_table_tsv(const AuditReport& r) {
    const Row header{"exchange", "symbol",         "subperiod",          "n_total",  "n_excess",
                     "gapped", "uncovered", "p_excess",       "cond_mean_excess",   "unit",     "avg_price",
                     "cond_mean_excess_usd"};
    std::vector<Row> rows;
    for (const auto& m : r.markets) {
        for (const auto& u : m.units) {
            Row row{m.market.exchange, m.market.symbol, std::string(to_string(u.unit))};
            if (u.stats) {
                const Amount e = u.stats->cond_mean_excess();
                row.insert(row.end(), {std::to_string(u.stats->n_total), std::to_string(u.stats->n_excess),
                                       std::to_string(u.gapped), std::to_string(u.uncovered), fmt::format("{:.6f}", u.stats->p_excess()),
                                       e.value().to_string(), std::string(to_string(e.unit())),
                                       m.avg_price ? m.avg_price->to_string() : "", exact_usd(m, e)});
            } else {
                row.insert(row.end(), {"0", "0", std::to_string(u.gapped), std::to_string(u.uncovered), "", "",
                                       std::string(to_string(m.market.native_unit())),
                                       m.avg_price ? m.avg_price->to_string() : "", ""});
            }
            rows.push_back(std::move(row));
        }
    }
    return tsv(header, rows);
}

std::string series_tsv(const MarketReport& m) {
    std::string out = "ts\ttime\texcess\tprice\tvalid\n";
    for (const auto& p : m.series) {
        out += fmt::format("{}\t{}\t{}\t{}\t{}\n", p.ts, format_iso8601(p.ts), p.excess.value().to_string(),
                           p.last_price ? p.last_price->to_string() : "", p.valid ? 1 : 0);
    }
    return out;
}

}  // namespace oiaudit::report
