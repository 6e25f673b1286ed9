#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "oiaudit/core/error.hpp"
#include "oiaudit/ingest/config.hpp"
#include "oiaudit/report/audit.hpp"
#include "oiaudit/report/format.hpp"
#include "oiaudit/report/live.hpp"
#include "oiaudit/report/manifest.hpp"
#include "oiaudit/report/scenario_io.hpp"
#include "oiaudit/report/simulation.hpp"
#include "oiaudit/report/tables.hpp"
#include "oiaudit/simulate/generator.hpp"

namespace fs = std::filesystem;
using namespace oiaudit;

namespace {

enum Exit { OK = 0, USAGE = 1, DATA = 2, ORACLE = 3 };

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::vector<SubPeriod> parse_units(const std::string& csv) {
    std::vector<SubPeriod> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const auto item = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.push_back(parse_subperiod(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("no sub-periods given");
    return out;
}

struct CaptureArgs {
    std::string config;
    std::string out;
    double duration_s = 0;
};

int cmd_capture(const CaptureArgs& a) {
    const auto cfg = ingest::load_config(a.config);
    report::CaptureRunOptions opts;
    opts.out = a.out;
    opts.interrupted = &g_interrupted;
    if (a.duration_s > 0) opts.duration = std::chrono::milliseconds(static_cast<std::int64_t>(a.duration_s * 1000));
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto summary = report::run_capture(cfg, opts);
    for (const auto& m : summary.markets) {
        std::cout << m.market << "\trecords=" << m.records << "\tgaps=" << m.stats.gaps
                  << "\tdead_letters=" << m.stats.dead_letters << "\n";
    }
    if (summary.failure) {
        std::cerr << "capture aborted: " << *summary.failure << "\n";
        return DATA;
    }
    return OK;
}

struct AuditArgs {
    std::vector<std::string> in;
    std::string out;
    std::string period;
    std::string subperiods = "full,1d,1h,1min";
    std::int64_t tau_ms = 1;
    double gap_factor = 2.0;
    std::string interval_mode = "per_oi_update";
    std::string price_ref;
    std::string price_weighting = "unweighted";
    std::string config;
    bool serial = false;
};

int cmd_audit(const AuditArgs& a) {
    report::AuditRequest req;
    std::string config_canonical;
    if (!a.config.empty()) {
        const auto cfg = ingest::load_config(a.config);
        req.audit = cfg.audit;
        config_canonical = cfg.canonical;
    }
    req.audit.tau_ms = a.tau_ms;
    req.audit.gap_factor = a.gap_factor;
    if (a.interval_mode == "per_oi_update") {
        req.audit.interval_mode = reconcile::IntervalMode::per_oi_update();
    } else if (a.interval_mode.rfind("fixed:", 0) == 0) {
        req.audit.interval_mode = reconcile::IntervalMode::fixed(parse_subperiod(a.interval_mode.substr(6)));
    } else {
        throw std::invalid_argument("interval mode must be per_oi_update or fixed:<1d|1h|1min>");
    }
    req.audit.validate();
    req.subperiods = parse_units(a.subperiods);
    req.price_ref = a.price_ref;
    if (a.price_weighting == "volume") {
        req.weighting = stats::PriceWeighting::VOLUME;
    } else if (a.price_weighting != "unweighted") {
        throw std::invalid_argument("price weighting must be unweighted or volume");
    }
    std::optional<PeriodSpec> period;
    if (!a.period.empty()) period = report::parse_period_arg(a.period);

    const std::vector<fs::path> inputs(a.in.begin(), a.in.end());
    std::vector<fs::path> files;
    const auto streams = report::load_streams(inputs, &files);
    req.period = period ? *period : report::data_span(streams);

    const auto rep = report::run_audit(streams, req, !a.serial);
    const fs::path out(a.out);
    fs::create_directories(out / "series");
    write_file(out / "period_table.txt", report::period_table_text(rep));
    write_file(out / "period_table.tsv", report::period_table_tsv(rep));
    write_file(out / "subperiod_table.txt", report::subperiod_table_text(rep));
    write_file(out / "subperiod_table.tsv", report::subperiod_table_tsv(rep));
    for (const auto& m : rep.markets) {
        write_file(out / "series" / (report::market_slug(m.market) + ".tsv"), report::series_tsv(m));
    }
    write_file(out / "manifest.json", report::to_json(report::make_manifest(rep, files, config_canonical)).dump(2) + "\n");
    std::cout << report::period_table_text(rep);
    return OK;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out) {
    const auto scenario = report::load_scenario(scenario_path);
    const auto result = sim::generate(scenario.spec);
    report::write_simulation({out}, scenario, result);
    std::cout << "true events: " << result.true_stream.size() << ", reported events: " << result.reported_stream.size()
              << ", trades: " << result.truth.rows.size() << "\n";
    return OK;
}

int cmd_verify(const std::string& in) {
    const auto res = report::verify_simulation({in});
    std::cout << res.text();
    return res.ok() ? OK : ORACLE;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open-interest vs. volume auditor for perpetual swaps"};
    app.set_version_flag("--version", std::string(report::kVersion));
    app.require_subcommand(1);

    CaptureArgs cap;
    auto* c = app.add_subcommand("capture", "Stream configured markets into capture files");
    c->add_option("--config", cap.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    c->add_option("--out", cap.out, "Output directory")->required();
    c->add_option("--duration-s", cap.duration_s, "Stop after this many seconds (default: until interrupted)");

    AuditArgs au;
    auto* a = app.add_subcommand("audit", "Audit capture files");
    a->add_option("--in", au.in, "Capture files or directories")->required();
    a->add_option("--out", au.out, "Output directory")->required();
    a->add_option("--period", au.period, "START..END (epoch ms, ISO-8601 or dates; inclusive)");
    a->add_option("--subperiods", au.subperiods, "Comma list of full,1d,1h,1min")->capture_default_str();
    a->add_option("--tau-ms", au.tau_ms, "Latency allowance in ms")->capture_default_str();
    a->add_option("--gap-factor", au.gap_factor, "Cadence multiple that marks a missed OI poll (0 disables)")
        ->capture_default_str();
    a->add_option("--interval-mode", au.interval_mode, "per_oi_update or fixed:<1d|1h|1min>")->capture_default_str();
    a->add_option("--price-ref", au.price_ref, "EXCHANGE:SYMBOL whose trades price every row");
    a->add_option("--price-weighting", au.price_weighting, "unweighted or volume")->capture_default_str();
    a->add_option("--config", au.config, "Take audit defaults from a run configuration")->check(CLI::ExistingFile);
    a->add_flag("--serial", au.serial, "Use the serial reference kernels");

    std::string scenario;
    std::string sim_out;
    auto* s = app.add_subcommand("simulate", "Generate a synthetic venue run");
    s->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", sim_out, "Output directory")->required();

    std::string verify_in;
    auto* v = app.add_subcommand("verify", "Check a simulate output against its oracles");
    v->add_option("--in", verify_in, "simulate output directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? OK : USAGE;
    }

    try {
        if (*c) return cmd_capture(cap);
        if (*a) return cmd_audit(au);
        if (*s) return cmd_simulate(scenario, sim_out);
        if (*v) return cmd_verify(verify_in);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return DATA;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return USAGE;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return DATA;
    }
    return USAGE;
}
