#include <ctime>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "oiaudit/ingest/config.hpp"
#include "oiaudit/ingest/normalize.hpp"

using namespace oiaudit;
using namespace oiaudit::ingest;

namespace {

const RunConfig& shipped_config() {
    static const RunConfig cfg = load_config(std::string(OIAUDIT_SOURCE_DIR) + "/config/oiaudit.json");
    return cfg;
}

const VenueDescriptor& venue(const std::string& key) {
    for (const auto& v : shipped_config().markets) {
        if (v.market.key() == key) return v;
    }
    throw std::runtime_error("no venue " + key);
}

// Reference conversion through the C library.
EpochMs timegm_ms(int y, int mo, int d, int h, int mi, int s, int ms) {
    std::tm t{};
    t.tm_year = y - 1900;
    t.tm_mon = mo - 1;
    t.tm_mday = d;
    t.tm_hour = h;
    t.tm_min = mi;
    t.tm_sec = s;
    return static_cast<EpochMs>(timegm(&t)) * 1000 + ms;
}

}  // namespace

TEST(Config, ShippedConfigCoversTwelveMarkets) {
    const auto& cfg = shipped_config();
    EXPECT_EQ(cfg.markets.size(), 12u);
    EXPECT_EQ(cfg.audit.tau_ms, 1);
    EXPECT_EQ(cfg.capture.clock_skew_ms, 5000);
    std::map<std::string, int> per_exchange;
    for (const auto& m : cfg.markets) ++per_exchange[m.market.exchange];
    EXPECT_EQ(per_exchange.size(), 7u);
}

TEST(Config, RejectsWrongSchemaAndBadValues) {
    EXPECT_THROW(parse_config(json{{"schema_version", 2}}), std::invalid_argument);
    EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"audit", {{"tau_ms", 5000}}}}), std::invalid_argument);
    json j = json::parse(R"({"schema_version":1,"markets":[{"exchange":"X","symbol":"S","contract_kind":"LINEAR_PERP",
        "rest_oi_endpoint":"http://h/x","oi_poll_ms":50,"rules":[{"channel":"rest","kind":"OI_SAMPLE","size":"/oi"}]}]})");
    EXPECT_THROW(parse_config(j), std::invalid_argument);
    j["markets"][0]["oi_poll_ms"] = 100;
    EXPECT_NO_THROW(parse_config(j));
    j["markets"].push_back(j["markets"][0]);
    EXPECT_THROW(parse_config(j), std::invalid_argument);
}

TEST(Normalize, FixtureCorpus) {
    std::ifstream in(std::string(OIAUDIT_SOURCE_DIR) + "/tests/fixtures/venue_payloads.jsonl");
    ASSERT_TRUE(in);
    std::map<std::string, Normalizer> normalizers;
    for (const auto& v : shipped_config().markets) normalizers.emplace(v.market.key(), Normalizer(v));

    std::string line;
    int n = 0;
    std::map<std::string, int> seen;
    const EpochMs recv = 1'672'531'201'500;
    while (std::getline(in, line)) {
        const json fx = json::parse(line);
        const std::string key = fx.at("market");
        const std::string payload = fx.contains("payload_text") ? fx.at("payload_text").get<std::string>() : fx.at("payload").dump();
        const Channel ch = parse_channel(fx.at("channel").get<std::string>());
        const auto r = normalizers.at(key).normalize(payload, ch, recv);
        const std::string expect = fx.at("expect");
        SCOPED_TRACE(key + " " + payload);
        ++n;
        ++seen[key];
        if (expect == "ignored") {
            EXPECT_EQ(r.outcome, NormalizeResult::Outcome::IGNORED);
        } else if (expect == "dead_letter") {
            EXPECT_EQ(r.outcome, NormalizeResult::Outcome::DEAD_LETTER);
            EXPECT_FALSE(r.reason.empty());
        } else if (expect == "reply") {
            EXPECT_EQ(r.outcome, NormalizeResult::Outcome::REPLY);
        } else {
            ASSERT_EQ(r.outcome, NormalizeResult::Outcome::EVENTS) << r.reason;
            const auto& want = fx.at("events");
            ASSERT_EQ(r.events.size(), want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                const auto& e = r.events[i];
                EXPECT_EQ(to_string(e.kind), want[i].at("kind").get<std::string>());
                EXPECT_EQ(e.ts, want[i].at("ts").get<EpochMs>());
                EXPECT_EQ(e.size_or_value.value(), Decimal::parse(want[i].at("size").get<std::string>()));
                EXPECT_EQ(e.size_or_value.unit(), e.market.native_unit());
                EXPECT_EQ(e.price, Decimal::parse(want[i].at("price").get<std::string>()));
                EXPECT_EQ(to_string(e.ts_source), want[i].at("ts_source").get<std::string>());
                EXPECT_EQ(e.market.key(), key);
            }
        }
    }
    EXPECT_GE(n, 40);
    EXPECT_EQ(seen.size(), 12u);
}

TEST(Normalize, LiquidationFlagOnTradeMessage) {
    const Normalizer n(venue("Deribit:BTC_USD_IP"));
    const auto r = n.normalize(
        R"({"method":"subscription","params":{"channel":"trades.BTC-PERPETUAL.raw","data":[{"timestamp":1672531200001,"price":20000.5,"amount":40,"liquidation":"T"}]}})",
        Channel::WS, 1672531200002);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].kind, EventKind::LIQUIDATION);
}

TEST(Normalize, LinearOiPollIsCoinDenominated) {
    const Normalizer n(venue("Binance:BTC_USDT_P"));
    const auto r = n.normalize(R"({"openInterest": 51234.5, "symbol":"BTCUSDT", "time": 1672531200000})", Channel::REST, 1);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].kind, EventKind::OI_SAMPLE);
    EXPECT_EQ(r.events[0].size_or_value, Amount(Decimal::parse("51234.5"), Unit::BASE_COIN));
}

TEST(Normalize, WrongChannelDoesNotMatch) {
    const Normalizer n(venue("Binance:BTC_USDT_P"));
    EXPECT_EQ(n.normalize(R"({"openInterest":"1","symbol":"BTCUSDT","time":1})", Channel::WS, 1).outcome,
              NormalizeResult::Outcome::DEAD_LETTER);
}

TEST(Normalize, PingReplyEchoesField) {
    const Normalizer n(venue("HTX:BTC_USD_IP"));
    const auto r = n.normalize(R"({"ping":1672531200123})", Channel::WS, 1);
    EXPECT_EQ(r.reply, R"({"pong":1672531200123})");
}

TEST(Normalize, MissingTimestampFallsBackToReceiptTime) {
    auto v = venue("Binance:BTC_USDT_P");
    v.rules[1].ts.clear();
    const Normalizer n(v);
    const auto r = n.normalize(R"({"openInterest":"3","symbol":"BTCUSDT"})", Channel::REST, 1672531200777);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].ts, 1672531200777);
    EXPECT_EQ(r.events[0].ts_source, TsSource::LOCAL);
}

TEST(Normalize, NonPositiveTradeSizeIsQuarantined) {
    const Normalizer n(venue("Kraken:BTC_USD_P"));
    const auto r = n.normalize(R"({"feed":"trade","product_id":"PF_XBTUSD","type":"fill","time":1,"qty":0,"price":1})",
                               Channel::WS, 2);
    EXPECT_EQ(r.outcome, NormalizeResult::Outcome::DEAD_LETTER);
}

TEST(Timestamps, Iso8601AgainstTimegm) {
    EXPECT_EQ(parse_iso8601_ms("2023-01-01T00:00:00.000Z"), timegm_ms(2023, 1, 1, 0, 0, 0, 0));
    EXPECT_EQ(parse_iso8601_ms("2023-07-31T23:59:59.999Z"), timegm_ms(2023, 7, 31, 23, 59, 59, 999));
    EXPECT_EQ(parse_iso8601_ms("2024-02-29T12:00:00Z"), timegm_ms(2024, 2, 29, 12, 0, 0, 0));
    EXPECT_EQ(parse_iso8601_ms("2023-09-30T10:20:30.5+02:00"), timegm_ms(2023, 9, 30, 8, 20, 30, 500));
    EXPECT_EQ(parse_iso8601_ms("2023-01-01T00:00:00.123456789Z"), timegm_ms(2023, 1, 1, 0, 0, 0, 123));
    for (int y : {1999, 2000, 2020, 2023, 2100}) {
        for (int mo = 1; mo <= 12; ++mo) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%04d-%02d-28T13:14:15.016Z", y, mo);
            EXPECT_EQ(parse_iso8601_ms(buf), timegm_ms(y, mo, 28, 13, 14, 15, 16)) << buf;
        }
    }
    EXPECT_THROW((void)parse_iso8601_ms("2023-01-01T00:00:00"), std::invalid_argument);
    EXPECT_THROW((void)parse_iso8601_ms("2023-13-01T00:00:00Z"), std::invalid_argument);
    EXPECT_THROW((void)parse_iso8601_ms("2023-01-01"), std::invalid_argument);
}

TEST(Timestamps, NumericFormats) {
    VenueDescriptor v = venue("Binance:BTC_USDT_P");
    auto ts_of = [&](TsFormat f, const char* body) {
        v.rules[1].ts_format = f;
        const auto r = Normalizer(v).normalize(body, Channel::REST, 1);
        return r.events.at(0).ts;
    };
    EXPECT_EQ(ts_of(TsFormat::S, R"({"openInterest":"1","time":1672531200.123456})"), 1672531200123);
    EXPECT_EQ(ts_of(TsFormat::S, R"({"openInterest":"1","time":"1672531200"})"), 1672531200000);
    EXPECT_EQ(ts_of(TsFormat::US, R"({"openInterest":"1","time":1672531200123999})"), 1672531200123);
    EXPECT_EQ(ts_of(TsFormat::NS, R"({"openInterest":"1","time":"1672531200123999999"})"), 1672531200123);
}

TEST(JsonDecimal, NumbersAndStrings) {
    EXPECT_EQ(json_decimal(json(42)), Decimal::from_int(42));
    EXPECT_EQ(json_decimal(json(0.1)), Decimal::parse("0.1"));
    EXPECT_EQ(json_decimal(json("16578.50")), Decimal::parse("16578.5"));
    EXPECT_EQ(json_decimal(json("1e-5")), Decimal::parse("0.00001"));
    EXPECT_THROW((void)json_decimal(json("abc")), std::invalid_argument);
    EXPECT_THROW((void)json_decimal(json(true)), std::invalid_argument);
}
