#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oiaudit/core/error.hpp"
#include "oiaudit/reconcile/aggregate.hpp"
#include "oiaudit/reconcile/intervals.hpp"
#include "oiaudit/reconcile/series.hpp"
#include "support/attribution_oracle.hpp"
#include "support/builders.hpp"

using namespace oiaudit;
using namespace oiaudit::reconcile;
using oiaudit::testing::btc;
using oiaudit::testing::StreamBuilder;
using oiaudit::testing::usd;

namespace {

AuditConfig tau(std::int64_t ms) {
    AuditConfig c;
    c.tau_ms = ms;
    return c;
}

}  // namespace

TEST(Mtv, AbsoluteDifference) {
    EXPECT_EQ(mtv(btc("100"), btc("140")), btc("40"));
    EXPECT_EQ(mtv(usd("0"), usd("100")), usd("100"));  // two flat traders open $100
    EXPECT_EQ(mtv(usd("100"), usd("100")), usd("0"));  // $40 long transferred
    EXPECT_THROW((void)mtv(usd("1"), btc("1")), UnitMismatch);
}

TEST(BuildIntervals, ExactMatch) {
    StreamBuilder b;
    b.oi(1, "100").trade(500, "50").oi(1000, "150");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_EQ(iv[0].mtv, btc("50"));
    EXPECT_EQ(iv[0].volume, btc("50"));
    EXPECT_EQ(iv[0].excess, btc("0"));
    EXPECT_TRUE(iv[0].valid);
}

TEST(BuildIntervals, NoTradesIsAllExcess) {
    StreamBuilder b;
    b.oi(1, "100").oi(1000, "200");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_EQ(iv[0].mtv, btc("100"));
    EXPECT_EQ(iv[0].volume, btc("0"));
    EXPECT_EQ(iv[0].excess, btc("100"));
}

TEST(BuildIntervals, TradeAtIntervalEndIsInsideAndTailAttachesToTrailing) {
    StreamBuilder b;
    b.oi(1, "100").trade(1000, "50").oi(1000, "150").trade(1001, "30");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_EQ(iv[0].excess, btc("0"));
    EXPECT_EQ(iv[0].volume, btc("80"));
    EXPECT_EQ(iv[0].carried_from_next, btc("30"));
}

TEST(BuildIntervals, TauWindowRescuesDelayedTrade) {
    StreamBuilder b;
    b.oi(1, "100").oi(1000, "150").trade(1001, "50").oi(2000, "150");
    const auto with_tau = build_intervals(b.events(), tau(1));
    ASSERT_EQ(with_tau.size(), 2u);
    EXPECT_EQ(with_tau[0].excess, btc("0"));
    EXPECT_EQ(with_tau[0].carried_from_next, btc("50"));
    EXPECT_EQ(with_tau[1].carried_to_prev, btc("50"));
    EXPECT_EQ(with_tau[1].volume, btc("0"));

    const auto no_tau = build_intervals(b.events(), tau(0));
    EXPECT_EQ(no_tau[0].excess, btc("50"));
    EXPECT_EQ(no_tau[1].volume, btc("50"));
}

TEST(BuildIntervals, PullsOnlyTheDeficit) {
    // First interval is short by 5; the window trade of 10 is split so the
    // second interval keeps the 5 it needs.
    StreamBuilder b;
    b.oi(1, "0").oi(10, "5").trade(11, "10").oi(20, "0");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 2u);
    EXPECT_EQ(iv[0].volume, btc("5"));
    EXPECT_EQ(iv[1].volume, btc("5"));
    EXPECT_EQ(iv[0].excess, btc("0"));
    EXPECT_EQ(iv[1].excess, btc("0"));
}

TEST(BuildIntervals, SameMillisecondSamplesMakeZeroLengthInterval) {
    StreamBuilder b;
    b.oi(1, "0").oi(10, "5").oi(10, "8").trade(11, "8").oi(20, "0");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 3u);
    EXPECT_EQ(iv[1].t_start, iv[1].t_end);
    EXPECT_EQ(iv[0].excess, btc("0"));
    EXPECT_EQ(iv[1].excess, btc("0"));
    // 5 + 3 pulled back, nothing left for the last interval's |-8|.
    EXPECT_EQ(iv[2].excess, btc("8"));
}

TEST(BuildIntervals, Errors) {
    StreamBuilder none;
    none.trade(5, "1");
    EXPECT_THROW((void)build_intervals(none.events(), tau(1)), DataError);

    StreamBuilder one;
    one.oi(5, "1");
    EXPECT_THROW((void)build_intervals(one.events(), tau(1)), DataError);

    StreamBuilder unordered;
    unordered.oi(5, "1").oi(3, "2");
    EXPECT_THROW((void)build_intervals(unordered.events(), tau(1)), std::invalid_argument);

    AuditConfig bad;
    bad.tau_ms = 1001;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(BuildIntervals, TradesOutsideSpanAreNotCounted) {
    StreamBuilder b;
    b.trade(1, "7").oi(5, "0").trade(6, "3").oi(10, "3").trade(12, "9");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_EQ(iv[0].volume, btc("3"));
}

TEST(BuildIntervals, GapMarkerInvalidatesOverlappingIntervals) {
    StreamBuilder b;
    b.oi(1'000, "0").oi(2'000, "1").oi(3'000, "2").gap(3'500, 63'500).oi(4'000, "9").oi(64'000, "9").oi(65'000, "9");
    AuditConfig cfg = tau(1);
    cfg.gap_factor = 0;
    const auto iv = build_intervals(b.events(), cfg);
    ASSERT_EQ(iv.size(), 5u);
    EXPECT_TRUE(iv[0].valid);
    EXPECT_TRUE(iv[1].valid);
    EXPECT_FALSE(iv[2].valid);
    EXPECT_FALSE(iv[3].valid);
    EXPECT_TRUE(iv[4].valid);
}

TEST(BuildIntervals, MissedPollBeyondTwiceMedianCadenceIsInvalid) {
    StreamBuilder b;
    b.oi(1'000, "0").oi(1'500, "0").oi(2'000, "0").oi(2'500, "0").oi(4'000, "0").oi(4'500, "0");
    const auto iv = build_intervals(b.events(), tau(1));
    ASSERT_EQ(iv.size(), 5u);
    EXPECT_FALSE(iv[3].valid);
    EXPECT_EQ(std::count_if(iv.begin(), iv.end(), [](const auto& l) { return !l.valid; }), 1);
}

TEST(BuildIntervals, FixedModeUsesCalendarBoundaries) {
    StreamBuilder b;
    // OI at 00:00:30, 00:01:30, 00:02:30 UTC on the epoch day plus one minute offsets.
    const EpochMs base = 1'672'531'200'000;
    b.oi(base + 30'000, "10").trade(base + 40'000, "4").oi(base + 90'000, "14").trade(base + 100'000, "1")
        .oi(base + 150'000, "13").oi(base + 200'000, "13");
    AuditConfig cfg = tau(1);
    cfg.interval_mode = IntervalMode::fixed(SubPeriod::MIN1);
    cfg.gap_factor = 0;
    const auto iv = build_intervals(b.events(), cfg);
    ASSERT_EQ(iv.size(), 2u);
    EXPECT_EQ(iv[0].t_start, base + 60'000);
    EXPECT_EQ(iv[0].t_end, base + 120'000);
    EXPECT_EQ(iv[0].oi_start, btc("10"));
    EXPECT_EQ(iv[0].oi_end, btc("14"));
    EXPECT_EQ(iv[0].volume, btc("1"));
    EXPECT_EQ(iv[0].excess, btc("3"));
}

TEST(Aggregate, PublishedRowsAndEquality) {
    const MarketId bybit{"ByBit", "BTC_USD_IP", ContractKind::INVERSE_PERP};
    IntervalLedger l;
    l.t_start = 0;
    l.t_end = 10;
    l.mtv = usd("12088654910");
    l.volume = usd("6570819230");
    l.excess = sub_floor(l.mtv, l.volume);
    const std::vector<IntervalLedger> one{l};
    const auto a = aggregate(bybit, one, PeriodSpec::make(1, 100));
    EXPECT_EQ(a.x_tv, usd("5517835680"));

    IntervalLedger x;
    x.t_end = 5;
    x.mtv = btc("5");
    x.volume = btc("5");
    x.excess = btc("0");
    const std::vector<IntervalLedger> two{x, x};
    const auto b = aggregate(oiaudit::testing::linear_market(), two, PeriodSpec::make(1, 100));
    EXPECT_EQ(b.x_tv, btc("0"));
    EXPECT_EQ(b.o_tv, btc("10"));
}

TEST(Aggregate, EmptyIsNoDataNotError) {
    const auto a = aggregate(oiaudit::testing::linear_market(), {}, PeriodSpec::make(1, 100));
    EXPECT_EQ(a.intervals, 0u);
    EXPECT_FALSE(a.covered);
    EXPECT_EQ(a.x_tv, btc("0"));
}

TEST(Aggregate, ExcludesInvalidAndRejectsOutOfPeriod) {
    StreamBuilder b;
    b.oi(10, "0").oi(20, "5").gap(25, 26).oi(30, "50");
    AuditConfig cfg = tau(1);
    cfg.gap_factor = 0;
    const auto iv = build_intervals(b.events(), cfg);
    const auto a = aggregate(b.market(), iv, PeriodSpec::make(10, 30));
    EXPECT_EQ(a.invalid_intervals, 1u);
    EXPECT_EQ(a.o_tv, btc("5"));
    EXPECT_FALSE(a.valid());
    EXPECT_THROW((void)aggregate(b.market(), iv, PeriodSpec::make(21, 30)), std::invalid_argument);
}

TEST(TickSeries, OnePointPerUpdateWithLastPrice) {
    StreamBuilder b;
    b.oi(10, "0").oi(20, "5").trade(25, "1", "20001").oi(30, "6").trade(31, "2", "20002").oi(40, "6");
    const auto iv = build_intervals(b.events(), tau(0));
    const auto s = tick_excess_series(iv);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_FALSE(s[0].last_price.has_value());
    EXPECT_EQ(s[0].excess, btc("5"));
    EXPECT_EQ(*s[1].last_price, oiaudit::testing::dec("20001"));
    EXPECT_EQ(s[1].excess, btc("0"));
    EXPECT_EQ(*s[2].last_price, oiaudit::testing::dec("20002"));
    EXPECT_EQ(s[2].excess, btc("0"));
}

// Randomized small streams: greedy attribution against the brute-force
// enumeration, plus the no-double-counting checksum.
TEST(BuildIntervals, GreedyMatchesBruteForceOnSmallStreams) {
    std::mt19937_64 rng(2024);
    int feasible = 0;
    int checked = 0;
    for (int iter = 0; iter < 400; ++iter) {
        const std::int64_t t = static_cast<std::int64_t>(rng() % 4);
        const int n_samples = 2 + static_cast<int>(rng() % 5);
        const int n_trades = static_cast<int>(rng() % 12);
        std::vector<std::int64_t> sts;
        for (int i = 0; i < n_samples; ++i) sts.push_back(1 + static_cast<std::int64_t>(rng() % 20));
        std::sort(sts.begin(), sts.end());

        StreamBuilder b;
        std::vector<oiaudit::testing::OracleSample> os;
        std::vector<oiaudit::testing::OracleTrade> ot;
        std::vector<std::pair<std::int64_t, int>> evs;  // ts, index (-1 - k for samples)
        for (int i = 0; i < n_samples; ++i) evs.push_back({sts[static_cast<std::size_t>(i)], -1 - i});
        for (int i = 0; i < n_trades; ++i) evs.push_back({1 + static_cast<std::int64_t>(rng() % 25), i});
        std::stable_sort(evs.begin(), evs.end(), [](auto& x, auto& y) { return x.first < y.first; });
        for (auto [ts, idx] : evs) {
            if (idx < 0) {
                const std::int64_t oi = static_cast<std::int64_t>(rng() % 15);
                b.oi(ts, std::to_string(oi));
                os.push_back({ts, oi});
            } else {
                const std::int64_t size = 1 + static_cast<std::int64_t>(rng() % 9);
                b.trade(ts, std::to_string(size));
                ot.push_back({ts, size});
            }
        }
        AuditConfig cfg = tau(t);
        cfg.gap_factor = 0;
        const auto iv = build_intervals(b.events(), cfg);
        const auto oracle = oiaudit::testing::enumerate_attributions(os, ot, t);
        ASSERT_TRUE(oracle.has_value());
        ++checked;

        Decimal total;
        for (const auto& l : iv) total += l.volume.value();
        EXPECT_EQ(total, Decimal::from_int(oracle->counted_volume));

        if (oracle->any_satisfying) {
            ++feasible;
            for (const auto& l : iv) EXPECT_TRUE(l.excess.is_zero()) << "iteration " << iter;
        }
    }
    EXPECT_GT(feasible, 40);
    EXPECT_EQ(checked, 400);
}
