#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <zlib.h>

#include "oiaudit/core/ordering.hpp"
#include "oiaudit/ingest/config.hpp"
#include "oiaudit/ingest/connector.hpp"
#include "oiaudit/reconcile/intervals.hpp"
#include "support/mock_venue.hpp"

using namespace oiaudit;
using namespace oiaudit::ingest;
using namespace std::chrono_literals;
using oiaudit::testing::MockWsServer;

namespace {

VenueDescriptor shipped(const std::string& key) {
    static const RunConfig cfg = load_config(std::string(OIAUDIT_SOURCE_DIR) + "/config/oiaudit.json");
    for (const auto& v : cfg.markets) {
        if (v.market.key() == key) return v;
    }
    throw std::runtime_error("no venue " + key);
}

// Pops records until `done(records)` holds or the deadline passes.
template <class Pred>
std::vector<CaptureRecord> collect(MarketQueue& q, Pred done, std::chrono::milliseconds limit = 10s) {
    std::vector<CaptureRecord> out;
    const auto deadline = std::chrono::steady_clock::now() + limit;
    while (!done(out) && std::chrono::steady_clock::now() < deadline) q.pop_batch(out, 20ms);
    return out;
}

void drain(MarketQueue& q, std::vector<CaptureRecord>& out) {
    q.pop_batch(out, 1ms);
}

template <class Pred>
bool wait_for(Pred p, std::chrono::milliseconds limit = 5s) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    while (!p()) {
        if (std::chrono::steady_clock::now() > deadline) return false;
        std::this_thread::sleep_for(5ms);
    }
    return true;
}

std::string bybit_trade(EpochMs ts, const char* size) {
    return R"({"topic":"publicTrade.BTCUSDT","type":"snapshot","ts":)" + std::to_string(ts) + R"(,"data":[{"T":)" +
           std::to_string(ts) + R"(,"s":"BTCUSDT","S":"Buy","v":")" + size + R"(","p":"20000.5","BT":false}]})";
}

std::string bybit_oi(EpochMs ts, const char* oi) {
    return R"({"topic":"tickers.BTCUSDT","type":"snapshot","ts":)" + std::to_string(ts) +
           R"(,"data":{"symbol":"BTCUSDT","openInterest":")" + oi + R"("}})";
}

std::string gzip(const std::string& text) {
    z_stream zs{};
    deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
    std::string out(deflateBound(&zs, static_cast<uLong>(text.size())) + 32, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
    zs.avail_in = static_cast<uInt>(text.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

void read_until_closed(MockWsServer::Ws& ws) {
    boost::beast::flat_buffer buf;
    boost::system::error_code ec;
    while (!ec) ws.read(buf, ec);
}

}  // namespace

TEST(Url, Parsing) {
    const auto u = parse_url("wss://ws.okx.com:8443/ws/v5/public");
    EXPECT_EQ(u.host, "ws.okx.com");
    EXPECT_EQ(u.port, "8443");
    EXPECT_EQ(u.target, "/ws/v5/public");
    EXPECT_TRUE(u.tls());
    const auto v = parse_url("https://fapi.binance.com?symbol=BTCUSDT");
    EXPECT_EQ(v.port, "443");
    EXPECT_EQ(v.target, "/?symbol=BTCUSDT");
    EXPECT_EQ(parse_url("ws://127.0.0.1:9").target, "/");
    EXPECT_THROW((void)parse_url("ftp://x/"), std::invalid_argument);
    EXPECT_THROW((void)parse_url("ws://:80/"), std::invalid_argument);
    EXPECT_THROW((void)parse_url("ws://h:x/"), std::invalid_argument);
}

TEST(Gzip, RoundTripAndCorruption) {
    const std::string text(5000, 'z');
    EXPECT_EQ(gunzip(gzip(text)), text);
    std::string bad = gzip("hello");
    bad.resize(bad.size() - 6);
    EXPECT_THROW((void)gunzip(bad), std::runtime_error);
}

TEST(Connector, OutageYieldsGapMarkerThatInvalidatesIntervals) {
    MockWsServer server;
    std::string subscribed;
    server.serve([&](MockWsServer::Ws& ws, int conn) {
        boost::beast::flat_buffer buf;
        ws.read(buf);
        if (conn == 0) subscribed = boost::beast::buffers_to_string(buf.data());
        ws.text(true);
        const char* oi[] = {"100", "101.5", "99"};
        for (int i = 0; i < 3; ++i) {
            ws.write(boost::asio::buffer(bybit_oi(wall_clock_ms(), oi[i])));
            std::this_thread::sleep_for(15ms);
            if (i < 2) ws.write(boost::asio::buffer(bybit_trade(wall_clock_ms(), "1.5")));
            std::this_thread::sleep_for(15ms);
        }
        if (conn == 0) {
            ws.next_layer().close();  // drop without a close frame
            return std::chrono::milliseconds(600);
        }
        read_until_closed(ws);
        return std::chrono::milliseconds(0);
    });

    auto v = shipped("ByBit:BTC_USDT_P");
    v.ws_endpoint = server.url();
    v.reconnect_backoff_ms = {20};
    MarketQueue q(v.market, 1000);
    Connector c(v, q);
    c.start();
    auto recs = collect(q, [](const auto& r) { return r.size() >= 11; });
    c.stop();
    server.stop();
    drain(q, recs);

    ASSERT_FALSE(c.terminal_error());
    ASSERT_EQ(recs.size(), 11u);
    EXPECT_EQ(json::parse(subscribed), json::parse(v.subscribe.at(0)));
    for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].event.seq, i + 1);

    ASSERT_EQ(recs[5].event.kind, EventKind::GAP);
    const auto& gap = recs[5].event;
    EXPECT_EQ(recs[5].channel, Channel::GAP);
    EXPECT_EQ(gap.ts, recs[4].recv_ts);
    EXPECT_GE(gap.gap_end - gap.ts, 550);
    EXPECT_EQ(gap.gap_end, recs[5].recv_ts);
    EXPECT_EQ(c.stats().gaps, 1u);
    EXPECT_EQ(c.stats().sessions, 2u);

    std::vector<MarketEvent> events;
    for (const auto& r : recs) events.push_back(r.event);
    reconcile::AuditConfig cfg;
    cfg.gap_factor = 0;
    const auto iv = reconcile::build_intervals(order_events(events), cfg);
    ASSERT_EQ(iv.size(), 5u);
    EXPECT_TRUE(iv[0].valid);
    EXPECT_FALSE(iv[2].valid);  // spans the outage
    EXPECT_TRUE(iv[4].valid);
    EXPECT_EQ(iv[0].volume.value(), Decimal::parse("1.5"));
}

TEST(Connector, HandshakeRejectionIsTerminal) {
    MockWsServer server;
    server.refuse_with(403);
    auto v = shipped("ByBit:BTC_USDT_P");
    v.ws_endpoint = server.url();
    v.reconnect_backoff_ms = {10};
    MarketQueue q(v.market, 10);
    Connector c(v, q);
    c.start();
    ASSERT_TRUE(wait_for([&] { return c.terminal_error().has_value(); }));
    std::this_thread::sleep_for(100ms);
    c.stop();
    server.stop();
    EXPECT_NE(c.terminal_error()->find("403"), std::string::npos);
    EXPECT_EQ(server.refusals(), 1);
    EXPECT_EQ(q.pushed(), 0u);
}

TEST(Connector, ServerErrorsAreRetried) {
    MockWsServer server;
    server.refuse_with(503);
    auto v = shipped("ByBit:BTC_USDT_P");
    v.ws_endpoint = server.url();
    v.reconnect_backoff_ms = {10, 20};
    MarketQueue q(v.market, 10);
    Connector c(v, q);
    c.start();
    EXPECT_TRUE(wait_for([&] { return server.refusals() >= 3; }));
    c.stop();
    server.stop();
    EXPECT_FALSE(c.terminal_error());
    EXPECT_EQ(q.pushed(), 0u);  // never established, so no gap either
}

TEST(Connector, IdleTimeoutReconnects) {
    MockWsServer server;
    server.serve([&](MockWsServer::Ws& ws, int conn) {
        boost::beast::flat_buffer buf;
        ws.read(buf);
        ws.text(true);
        ws.write(boost::asio::buffer(bybit_trade(wall_clock_ms(), "2")));
        if (conn == 0) {
            std::this_thread::sleep_for(400ms);
            return std::chrono::milliseconds(0);
        }
        read_until_closed(ws);
        return std::chrono::milliseconds(0);
    });
    auto v = shipped("ByBit:BTC_USDT_P");
    v.ws_endpoint = server.url();
    v.reconnect_backoff_ms = {10};
    v.idle_timeout_ms = 150;
    MarketQueue q(v.market, 100);
    Connector c(v, q);
    c.start();
    auto recs = collect(q, [](const auto& r) { return r.size() >= 3; });
    c.stop();
    server.stop();
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].event.kind, EventKind::TRADE);
    EXPECT_EQ(recs[1].event.kind, EventKind::GAP);
    EXPECT_GE(recs[1].event.gap_end - recs[1].event.ts, 100);
    EXPECT_EQ(recs[2].event.kind, EventKind::TRADE);
}

TEST(Connector, GzipFramesAndPingReplies) {
    MockWsServer server;
    std::string reply;
    server.serve([&](MockWsServer::Ws& ws, int) {
        boost::beast::flat_buffer buf;
        ws.read(buf);
        ws.binary(true);
        ws.write(boost::asio::buffer(gzip(R"({"ping":1672531200123})")));
        buf.consume(buf.size());
        ws.read(buf);
        reply = boost::beast::buffers_to_string(buf.data());
        const EpochMs t = wall_clock_ms();
        ws.write(boost::asio::buffer(gzip(R"({"ch":"market.BTC-USD.trade.detail","ts":)" + std::to_string(t) +
                                          R"(,"tick":{"data":[{"amount":3,"quantity":0.0002,"ts":)" + std::to_string(t) +
                                          R"(,"price":20000,"direction":"buy"}]}})")));
        ws.write(boost::asio::buffer(std::string("\x1f\x8b garbage")));
        read_until_closed(ws);
        return std::chrono::milliseconds(0);
    });
    auto v = shipped("HTX:BTC_USD_IP");
    v.ws_endpoint = server.url();
    v.rest_oi_endpoint.clear();
    v.rules.pop_back();
    MarketQueue q(v.market, 100);
    Connector c(v, q);
    c.start();
    auto recs = collect(q, [](const auto& r) { return !r.empty(); });
    ASSERT_TRUE(wait_for([&] { return c.stats().dead_letters == 1; }));
    c.stop();
    server.stop();
    EXPECT_EQ(reply, R"({"pong":1672531200123})");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].event.size_or_value, Amount(Decimal::from_int(300), Unit::USD));
    EXPECT_FALSE(recs[0].raw.empty());
}

TEST(Connector, QueueOverflowAbortsLoudly) {
    MockWsServer server;
    server.serve([&](MockWsServer::Ws& ws, int) {
        boost::beast::flat_buffer buf;
        ws.read(buf);
        ws.text(true);
        for (int i = 0; i < 5; ++i) ws.write(boost::asio::buffer(bybit_trade(wall_clock_ms(), "1")));
        read_until_closed(ws);
        return std::chrono::milliseconds(0);
    });
    auto v = shipped("ByBit:BTC_USDT_P");
    v.ws_endpoint = server.url();
    MarketQueue q(v.market, 2);
    Connector c(v, q);
    c.start();
    ASSERT_TRUE(wait_for([&] { return c.terminal_error().has_value(); }));
    c.stop();
    server.stop();
    EXPECT_NE(c.terminal_error()->find("full"), std::string::npos);
}

TEST(Connector, RestPollingRecordsOutageAsGap) {
    httplib::Server http;
    std::atomic<int> calls{0};
    http.Get("/fapi/v1/openInterest", [&](const httplib::Request&, httplib::Response& res) {
        const int n = calls++;
        if (n >= 3 && n < 6) {
            res.status = 500;
            return;
        }
        res.set_content(R"({"openInterest":"51234.5","symbol":"BTCUSDT","time":)" + std::to_string(wall_clock_ms()) + "}",
                        "application/json");
    });
    const int port = http.bind_to_any_port("127.0.0.1");
    std::thread t([&] { http.listen_after_bind(); });

    auto v = shipped("Binance:BTC_USDT_P");
    v.ws_endpoint.clear();
    v.rest_oi_endpoint = "http://127.0.0.1:" + std::to_string(port) + "/fapi/v1/openInterest?symbol=BTCUSDT";
    v.oi_poll_ms = 100;
    MarketQueue q(v.market, 100);
    Connector c(v, q);
    c.start();
    auto recs = collect(q, [](const auto& r) { return r.size() >= 6; });
    c.stop();
    http.stop();
    t.join();
    drain(q, recs);

    ASSERT_GE(recs.size(), 6u);
    EXPECT_EQ(recs[0].event.kind, EventKind::OI_SAMPLE);
    EXPECT_EQ(recs[0].event.size_or_value, Amount(Decimal::parse("51234.5"), Unit::BASE_COIN));
    EXPECT_EQ(recs[0].channel, Channel::REST);
    ASSERT_EQ(recs[3].event.kind, EventKind::GAP);
    EXPECT_EQ(recs[3].event.ts, recs[2].recv_ts);
    EXPECT_EQ(recs[3].event.gap_end, recs[4].recv_ts);
    EXPECT_GE(recs[3].event.gap_end - recs[3].event.ts, 300);
    EXPECT_EQ(c.stats().polls_failed, 3u);
}

TEST(Connector, RestClientErrorIsTerminal) {
    httplib::Server http;
    http.Get("/oi", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    const int port = http.bind_to_any_port("127.0.0.1");
    std::thread t([&] { http.listen_after_bind(); });
    auto v = shipped("Binance:BTC_USDT_P");
    v.ws_endpoint.clear();
    v.rest_oi_endpoint = "http://127.0.0.1:" + std::to_string(port) + "/oi";
    MarketQueue q(v.market, 10);
    Connector c(v, q);
    c.start();
    ASSERT_TRUE(wait_for([&] { return c.terminal_error().has_value(); }));
    c.stop();
    http.stop();
    t.join();
    EXPECT_NE(c.terminal_error()->find("404"), std::string::npos);
}

TEST(MarketQueue, AssignsMonotoneSeqAndCountsSkew) {
    const MarketId m{"X", "Y", ContractKind::LINEAR_PERP};
    MarketQueue q(m, 10, 5000);
    CaptureRecord r;
    r.event = make_trade(m, 100'000, Decimal::from_int(1), Decimal::from_int(1), 0);
    r.recv_ts = 90'000;  // 10 s before the exchange clock
    EXPECT_EQ(q.push(r), 1u);
    r.recv_ts = 99'000;
    EXPECT_EQ(q.push(r), 2u);
    EXPECT_EQ(q.skew_violations(), 1u);
    std::vector<CaptureRecord> out;
    q.pop_batch(out, 1ms);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].event.seq, 1u);
    EXPECT_EQ(out[1].event.seq, 2u);
    r.event.market.symbol = "Z";
    EXPECT_THROW(q.push(r), std::invalid_argument);
}
