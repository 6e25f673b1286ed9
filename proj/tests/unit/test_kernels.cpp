#include <random>

#include <gtest/gtest.h>

#include "oiaudit/kernels/subperiods.hpp"
#include "oiaudit/reconcile/intervals.hpp"
#include "support/builders.hpp"

using namespace oiaudit;

namespace {

std::vector<MarketEvent> random_stream(std::uint64_t seed, EpochMs start, EpochMs span_ms, int n) {
    std::mt19937_64 rng(seed);
    oiaudit::testing::StreamBuilder b;
    EpochMs t = start;
    std::int64_t oi = 1000;
    for (int i = 0; i < n; ++i) {
        t += 1 + static_cast<EpochMs>(rng() % static_cast<std::uint64_t>(2 * span_ms / n));
        if (rng() % 3 == 0) {
            oi = std::max<std::int64_t>(0, oi + static_cast<std::int64_t>(rng() % 21) - 10);
            b.oi(t, std::to_string(oi));
        } else {
            b.trade(t, std::to_string(1 + rng() % 7));
        }
        if (rng() % 500 == 0) b.gap(t, t + static_cast<EpochMs>(rng() % 200'000));
    }
    return b.events();
}

}  // namespace

TEST(SubperiodKernel, GridIsUtcAlignedAndClipped) {
    const auto grid = kernels::subperiod_grid(PeriodSpec{90'000, 250'000, SubPeriod::FULL}, SubPeriod::MIN1);
    ASSERT_EQ(grid.size(), 4u);
    EXPECT_EQ(grid[0].start, 90'000);
    EXPECT_EQ(grid[0].end, 119'999);
    EXPECT_EQ(grid[1].start, 120'000);
    EXPECT_EQ(grid[3].end, 250'000);
}

TEST(SubperiodKernel, ParallelMatchesSerialReference) {
    const MarketId m = oiaudit::testing::linear_market();
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const EpochMs start = 1'672'531'200'000 + static_cast<EpochMs>(seed * 7'777);
        const auto events = random_stream(seed, start, 3 * 3'600'000, 20'000);
        reconcile::AuditConfig cfg;
        const auto iv = reconcile::build_intervals(events, cfg);
        const PeriodSpec period{start, events.back().ts, SubPeriod::FULL};
        for (auto unit : {SubPeriod::FULL, SubPeriod::H1, SubPeriod::MIN1}) {
            const auto par = kernels::subperiod_audits(m, iv, period, unit);
            const auto ser = kernels::subperiod_audits_serial(m, iv, period, unit);
            ASSERT_EQ(par.size(), ser.size());
            for (std::size_t k = 0; k < par.size(); ++k) {
                EXPECT_EQ(par[k], ser[k]) << "seed " << seed << " unit " << to_string(unit) << " bucket " << k;
            }
        }
    }
}

TEST(SubperiodKernel, CoarseExcessNeverExceedsSumOfFine) {
    const MarketId m = oiaudit::testing::linear_market();
    const EpochMs start = 1'672'531'200'000;
    const auto events = random_stream(99, start, 2 * 3'600'000, 30'000);
    const auto iv = reconcile::build_intervals(events, reconcile::AuditConfig{});
    const PeriodSpec period{start, events.back().ts, SubPeriod::FULL};
    const auto full = kernels::subperiod_audits(m, iv, period, SubPeriod::FULL).front();
    Decimal hourly;
    Decimal minutely;
    for (const auto& a : kernels::subperiod_audits(m, iv, period, SubPeriod::H1)) hourly += a.x_tv.value();
    for (const auto& a : kernels::subperiod_audits(m, iv, period, SubPeriod::MIN1)) minutely += a.x_tv.value();
    EXPECT_LE(full.x_tv.value(), hourly);
    EXPECT_LE(hourly, minutely);
}

TEST(SubperiodKernel, BucketsInsideAGapAreExcluded) {
    oiaudit::testing::StreamBuilder b;
    const EpochMs t0 = 1'672'531'200'000;
    for (int k = 0; k <= 10; ++k) b.oi(t0 + k * 30'000, "5");
    b.gap(t0 + 300'005, t0 + 500'000);
    for (int k = 17; k <= 20; ++k) b.oi(t0 + k * 30'000, "5");
    reconcile::AuditConfig cfg;
    cfg.gap_factor = 0;
    const auto iv = reconcile::build_intervals(b.events(), cfg);
    const auto audits = kernels::subperiod_audits(b.market(), iv, PeriodSpec{t0, t0 + 600'000, SubPeriod::FULL},
                                                  SubPeriod::MIN1);
    // Minutes 5..8 overlap the gap even though no interval ends in 6..7.
    for (int k = 0; k < 5; ++k) EXPECT_TRUE(audits[static_cast<std::size_t>(k)].valid()) << k;
    for (int k = 5; k <= 8; ++k) EXPECT_FALSE(audits[static_cast<std::size_t>(k)].valid()) << k;
    EXPECT_TRUE(audits[9].valid());
}
