#include "oiaudit/report/live.hpp"

#include <fstream>
#include <memory>
#include <thread>

#include <spdlog/spdlog.h>

#include "oiaudit/ingest/capture.hpp"
#include "oiaudit/report/format.hpp"
#include "oiaudit/report/manifest.hpp"
#include "oiaudit/report/tables.hpp"

namespace oiaudit::report {
namespace {

namespace fs = std::filesystem;

struct MarketPipeline {
    std::unique_ptr<ingest::MarketQueue> queue;
    std::unique_ptr<ingest::DeadLetterWriter> dead;
    std::unique_ptr<ingest::CaptureWriter> writer;
    std::unique_ptr<ingest::Connector> connector;
    std::thread consumer;
};

void drain(ingest::MarketQueue& q, ingest::CaptureWriter& w) {
    std::vector<ingest::CaptureRecord> batch;
    while (q.pop_batch(batch, std::chrono::milliseconds(100))) {
        for (const auto& rec : batch) w.append(rec);
        batch.clear();
        w.flush();
    }
    for (const auto& rec : batch) w.append(rec);
    w.flush();
}

}  // namespace

CaptureRunSummary run_capture(const ingest::RunConfig& cfg, const CaptureRunOptions& opts) {
    fs::create_directories(opts.out);
    const EpochMs started = ingest::wall_clock_ms();
    ingest::ConnectorOptions copts = opts.connector;
    copts.keep_raw = cfg.capture.raw_payloads;

    std::vector<MarketPipeline> pipes(cfg.markets.size());
    for (std::size_t i = 0; i < cfg.markets.size(); ++i) {
        const auto& v = cfg.markets[i];
        auto& p = pipes[i];
        const std::string slug = market_slug(v.market);
        p.queue = std::make_unique<ingest::MarketQueue>(v.market, cfg.capture.queue_capacity, cfg.capture.clock_skew_ms);
        p.dead = std::make_unique<ingest::DeadLetterWriter>(opts.out / (slug + ".deadletter"));
        p.writer = std::make_unique<ingest::CaptureWriter>(opts.out / (slug + ".oicap"), v.market);
        p.connector = std::make_unique<ingest::Connector>(v, *p.queue, p.dead.get(), copts);
    }
    for (auto& p : pipes) p.consumer = std::thread([&p] { drain(*p.queue, *p.writer); });
    for (auto& p : pipes) p.connector->start();
    spdlog::info("capturing {} markets into {}", pipes.size(), opts.out.string());

    CaptureRunSummary summary;
    const auto deadline = opts.duration ? std::chrono::steady_clock::now() + *opts.duration
                                        : std::chrono::steady_clock::time_point::max();
    while (std::chrono::steady_clock::now() < deadline && !(opts.interrupted && *opts.interrupted)) {
        for (auto& p : pipes) {
            if (auto err = p.connector->terminal_error(); err && !summary.failure) summary.failure = err;
        }
        if (summary.failure) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }

    for (auto& p : pipes) p.connector->stop();
    for (auto& p : pipes) {
        p.queue->close();
        p.consumer.join();
    }

    ingest::json markets = ingest::json::array();
    for (std::size_t i = 0; i < pipes.size(); ++i) {
        auto& p = pipes[i];
        const auto st = p.connector->stats();
        summary.markets.push_back({cfg.markets[i].market.key(), p.writer->records_written(), p.queue->skew_violations(), st});
        markets.push_back({{"market", cfg.markets[i].market.key()},
                           {"file", market_slug(cfg.markets[i].market) + ".oicap"},
                           {"records", p.writer->records_written()},
                           {"dead_letters", p.dead->count()},
                           {"gaps", st.gaps},
                           {"sessions", st.sessions},
                           {"skew_violations", p.queue->skew_violations()}});
    }
    const ingest::json manifest = {
        {"version", std::string(kVersion)},
        {"config_sha256", sha256_hex(cfg.canonical)},
        {"started", format_iso8601(started)},
        {"ended", format_iso8601(ingest::wall_clock_ms())},
        {"markets", markets},
        {"failure", summary.failure ? ingest::json(*summary.failure) : ingest::json(nullptr)},
    };
    std::ofstream(opts.out / "capture_manifest.json") << manifest.dump(2) << '\n';
    return summary;
}

}  // namespace oiaudit::report
