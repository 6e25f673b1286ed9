// OpenMP kernels against their serial references.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "oiaudit/kernels/markets.hpp"
#include "oiaudit/kernels/subperiods.hpp"
#include "oiaudit/reconcile/intervals.hpp"
#include "oiaudit/simulate/generator.hpp"

namespace {

using namespace oiaudit;

std::vector<MarketEvent> honest_stream(std::uint64_t seed, std::int64_t steps) {
    sim::ScenarioSpec spec;
    spec.rng_seed = seed;
    spec.n_steps = steps;
    spec.market.symbol = "BTC_USDT_P_" + std::to_string(seed);
    return sim::generate(spec).reported_stream;
}

struct OneMarket {
    MarketId market;
    std::vector<reconcile::IntervalLedger> intervals;
    PeriodSpec period;
};

const OneMarket& one_market() {
    static const OneMarket m = [] {
        const auto stream = honest_stream(1, 400'000);
        OneMarket out;
        out.market = stream.front().market;
        out.intervals = reconcile::build_intervals(stream, {});
        out.period = PeriodSpec::make(stream.front().ts, stream.back().ts);
        return out;
    }();
    return m;
}

const std::vector<std::vector<MarketEvent>>& many_markets() {
    static const std::vector<std::vector<MarketEvent>> s = [] {
        std::vector<std::vector<MarketEvent>> out;
        for (std::uint64_t seed = 1; seed <= 8; ++seed) out.push_back(honest_stream(seed, 50'000));
        return out;
    }();
    return s;
}

PeriodSpec span_of(const std::vector<std::vector<MarketEvent>>& streams) {
    EpochMs lo = streams.front().front().ts;
    EpochMs hi = streams.front().back().ts;
    for (const auto& s : streams) {
        lo = std::min(lo, s.front().ts);
        hi = std::max(hi, s.back().ts);
    }
    return PeriodSpec::make(lo, hi);
}

void BM_SubperiodAudits(benchmark::State& state) {
    const auto& m = one_market();
    const auto unit = static_cast<SubPeriod>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::subperiod_audits(m.market, m.intervals, m.period, unit));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.intervals.size()));
}

void BM_SubperiodAuditsSerial(benchmark::State& state) {
    const auto& m = one_market();
    const auto unit = static_cast<SubPeriod>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::subperiod_audits_serial(m.market, m.intervals, m.period, unit));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.intervals.size()));
}

const SubPeriod kUnits[] = {SubPeriod::FULL, SubPeriod::D1, SubPeriod::H1, SubPeriod::MIN1};

std::int64_t total_events(const std::vector<std::vector<MarketEvent>>& streams) {
    std::int64_t n = 0;
    for (const auto& s : streams) n += static_cast<std::int64_t>(s.size());
    return n;
}

void BM_AuditMarkets(benchmark::State& state) {
    const auto& streams = many_markets();
    const auto period = span_of(streams);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::audit_markets(streams, {}, period, kUnits));
    state.SetItemsProcessed(state.iterations() * total_events(streams));
}

void BM_AuditMarketsSerial(benchmark::State& state) {
    const auto& streams = many_markets();
    const auto period = span_of(streams);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::audit_markets_serial(streams, {}, period, kUnits));
    state.SetItemsProcessed(state.iterations() * total_events(streams));
}

// Argument: SubPeriod enumerator (2 = 1H, 3 = 1min).
BENCHMARK(BM_SubperiodAudits)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SubperiodAuditsSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AuditMarkets)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AuditMarketsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
