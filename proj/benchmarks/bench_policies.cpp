#include <benchmark/benchmark.h>

#include <cstdint>
#include <optional>
#include <string>

#include <bufsim/bufferpool.hpp>
#include <bufsim/harness.hpp>
#include <bufsim/policies.hpp>
#include <bufsim/rng.hpp>
#include <bufsim/scantrack.hpp>
#include <bufsim/trace.hpp>

namespace {

using namespace bufsim;

/// Deterministic stand-in for the scan registry so victim selection is
/// measured without EWMA bookkeeping in the loop.
class SyntheticEstimator final : public NextAccessEstimator {
public:
    NextAccessEstimate estimate(const PageTag& tag, Tick) const override {
        if (tag.block % 5 == 0) return NextAccessEstimate::not_requested();
        return NextAccessEstimate::in_ticks(static_cast<double>(tag.block % 211));
    }
    std::optional<BlockGroupKey> covering_group(const PageTag& tag) const override {
        if (tag.block % 2 == 0) return BlockGroupKey{tag.relation, tag.block / 128};
        return std::nullopt;
    }
};

CacheState warm_state(std::size_t capacity, SplitMix64& rng) {
    CacheState state(capacity);
    ClockPolicy fill;
    for (std::size_t i = 0; i < capacity; ++i) {
        PageRequest r;
        r.seq = i;
        r.tag = {0, static_cast<std::uint32_t>(i)};
        r.op = i % 3 == 0 ? OpKind::kWrite : OpKind::kRead;
        r.access = AccessPattern::kRandom;
        state.access(r, fill, nullptr, rng);
    }
    return state;
}

Trace bench_trace() {
    ScanWorkloadParams sp;
    sp.relation_blocks = 2048;
    sp.num_streams = 2;
    sp.seed = 11;
    PointWorkloadParams pp;
    pp.relation_blocks = 1024;
    pp.num_requests = 4096;
    pp.zipf_s = 0.9;
    pp.write_fraction = 0.3;
    pp.seed = 12;
    return generate_mixed_workload(sp, pp, 0.5, 13);
}

void bench_select_victim(benchmark::State& bench, const std::string& name) {
    SplitMix64 rng(1);
    CacheState state(1024);
    state = warm_state(1024, rng);
    SyntheticEstimator estimator;

    PolicyConfig cfg;
    auto policy = [&]() -> std::unique_ptr<EvictionPolicy> {
        if (name == "belady") {
            Trace t = bench_trace();
            return std::make_unique<BeladyPolicy>(t);
        }
        return make_policy(name, cfg, nullptr);
    }();

    EvictionContext ctx{&estimator, &rng, 1 << 20};
    for (auto _ : bench) {
        benchmark::DoNotOptimize(policy->select_victim(state, ctx));
    }
}

void bench_run_simulation(benchmark::State& bench, const std::string& policy) {
    const NamedTrace trace{"bench", bench_trace()};
    SimConfig cfg;
    cfg.capacity_pages = 512;
    cfg.policy = policy;
    for (auto _ : bench) {
        benchmark::DoNotOptimize(run_simulation(trace, cfg));
    }
    bench.SetItemsProcessed(static_cast<std::int64_t>(bench.iterations()) *
                            static_cast<std::int64_t>(trace.trace.requests.size()));
}

}  // namespace

BENCHMARK_CAPTURE(bench_select_victim, clock, "clock");
BENCHMARK_CAPTURE(bench_select_victim, pbm_sampling, "pbm-sampling");
BENCHMARK_CAPTURE(bench_select_victim, evolved, "evolved");
BENCHMARK_CAPTURE(bench_select_victim, belady, "belady");

BENCHMARK_CAPTURE(bench_run_simulation, clock, "clock");
BENCHMARK_CAPTURE(bench_run_simulation, pbm_sampling, "pbm-sampling");
BENCHMARK_CAPTURE(bench_run_simulation, evolved, "evolved");
BENCHMARK_CAPTURE(bench_run_simulation, belady, "belady");

BENCHMARK_MAIN();
