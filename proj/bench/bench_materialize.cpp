// Naive reference vs semi-naive serial vs semi-naive OpenMP materialization on
// synthetic is_a knowledge bases, plus the indexed vs full-scan lookup.

#include <cstdint>
#include <random>

#include <benchmark/benchmark.h>

#include "cdc/inference.hpp"
#include "cdc/synthetic.hpp"

namespace {

cdc::FactStore kb(const benchmark::State& state) {
    cdc::SyntheticConfig config;
    config.facts = static_cast<std::size_t>(state.range(0));
    config.domains = static_cast<std::size_t>(state.range(1));
    return cdc::make_synthetic_kb(config);
}

void set_counters(benchmark::State& state, std::size_t derived) {
    state.counters["facts"] = static_cast<double>(state.range(0));
    state.counters["derived"] = static_cast<double>(derived);
}

void BM_reference(benchmark::State& state) {
    const auto store = kb(state);
    std::size_t derived = 0;
    for (auto _ : state) derived = cdc::materialize_reference(store).size();
    set_counters(state, derived);
}

void BM_serial(benchmark::State& state) {
    const auto store = kb(state);
    std::size_t derived = 0;
    for (auto _ : state) derived = cdc::materialize(store, cdc::Execution::serial).size();
    set_counters(state, derived);
}

void BM_parallel(benchmark::State& state) {
    const auto store = kb(state);
    std::size_t derived = 0;
    for (auto _ : state) derived = cdc::materialize(store, cdc::Execution::parallel).size();
    set_counters(state, derived);
}

void scan(benchmark::State& state, bool indexed) {
    const auto store = kb(state);
    const auto domains = store.domains(cdc::RelationId("is_a"));
    std::mt19937_64 rng(7);
    std::size_t entries = 0;
    for (auto _ : state) {
        cdc::FactPattern p{cdc::RelationId("is_a")};
        p.domain = domains[rng() % domains.size()];
        auto r = indexed ? store.match_counted(p) : store.scan_relation(p);
        entries += r.scanned;
        benchmark::DoNotOptimize(r.facts.data());
    }
    state.counters["entries/query"] = benchmark::Counter(static_cast<double>(entries), benchmark::Counter::kAvgIterations);
}

void BM_partition_scan(benchmark::State& state) { scan(state, true); }
void BM_full_scan(benchmark::State& state) { scan(state, false); }

}  // namespace

BENCHMARK(BM_reference)->Args({500, 5})->Args({2000, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_serial)->Args({500, 5})->Args({2000, 20})->Args({10000, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Args({500, 5})->Args({2000, 20})->Args({10000, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partition_scan)->Args({10000, 50});
BENCHMARK(BM_full_scan)->Args({10000, 50});

BENCHMARK_MAIN();
