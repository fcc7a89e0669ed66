// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
//
// OpenMP kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "homwalk/lattice.hpp"
#include "homwalk/measures.hpp"
#include "homwalk/walk.hpp"

using namespace homwalk;

namespace
{
Seed const kSeed = Seed::from_hex("be9c");

FiniteSupportMeasure power(int n)
{
    return convolution_power(generator_preset("unipotents-rot35"), n);
}

void BM_convolve(benchmark::State& state)
{
    auto a = power(int(state.range(0)));
    auto mu = generator_preset("unipotents-rot35");
    for (auto _ : state)
        benchmark::DoNotOptimize(convolve(a, mu));
    state.SetItemsProcessed(state.iterations() * a.size() * mu.size());
}

void BM_convolve_serial(benchmark::State& state)
{
    auto a = power(int(state.range(0)));
    auto mu = generator_preset("unipotents-rot35");
    for (auto _ : state)
        benchmark::DoNotOptimize(convolve_serial(a, mu));
    state.SetItemsProcessed(state.iterations() * a.size() * mu.size());
}

void bfs(benchmark::State& state, bool parallel)
{
    BfsOptions opts;
    opts.max_layers = int(state.range(0));
    opts.dedup_r = 0.02;
    opts.parallel = parallel;
    auto mu = generator_preset("unipotents-rot35");
    std::size_t points = 0;
    for (auto _ : state)
    {
        auto res = orbit_ball_bfs(mu, base_point(), opts);
        points = 0;
        for (auto const& l : res.layers)
            points += l.size();
        benchmark::DoNotOptimize(points);
    }
    state.counters["points"] = double(points);
}

void BM_bfs(benchmark::State& state) { bfs(state, true); }
void BM_bfs_serial(benchmark::State& state) { bfs(state, false); }

void BM_haar_sample(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(haar_sample(std::size_t(state.range(0)), 50, kSeed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_walks(benchmark::State& state)
{
    auto mu = generator_preset("unipotents-rot35");
    std::size_t trials = std::size_t(state.range(0));
    std::vector<SpacePoint> out(trials);
    for (auto _ : state)
    {
        parallel_trials(trials, [&](std::size_t t) {
            auto rng = make_rng(kSeed, Purpose::walk, t);
            out[t] = walk_endpoint(mu, base_point(), 100, rng);
        });
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

void BM_walks_serial(benchmark::State& state)
{
    auto mu = generator_preset("unipotents-rot35");
    std::size_t trials = std::size_t(state.range(0));
    std::vector<SpacePoint> out(trials);
    for (auto _ : state)
    {
        for (std::size_t t = 0; t < trials; ++t)
        {
            auto rng = make_rng(kSeed, Purpose::walk, t);
            out[t] = walk_endpoint(mu, base_point(), 100, rng);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * trials);
}
}  // namespace

BENCHMARK(BM_convolve)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_convolve_serial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bfs)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bfs_serial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_haar_sample)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walks)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walks_serial)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
