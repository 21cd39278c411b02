#include <benchmark/benchmark.h>

#include <random>

#include "cutguard/metrics.hpp"

using namespace cutguard;

namespace {

BinaryMask random_mask(std::uint32_t w, std::uint32_t h, unsigned seed) {
    std::mt19937 rng(seed);
    BinaryMask m = BinaryMask::zeros(w, h);
    for (auto& b : m.bits) b = rng() % 3 == 0;
    return m;
}

} // namespace

static void BM_Jaccard(benchmark::State& state) {
    const auto w = static_cast<std::uint32_t>(state.range(0));
    const BinaryMask a = random_mask(w, w, 1), b = random_mask(w, w, 2);
    for (auto _ : state) benchmark::DoNotOptimize(jaccard(a, b));
}
BENCHMARK(BM_Jaccard)->Arg(32)->Arg(128);

static void BM_BoundaryF(benchmark::State& state) {
    const auto w = static_cast<std::uint32_t>(state.range(0));
    const BinaryMask a = random_mask(w, w, 3), b = random_mask(w, w, 4);
    for (auto _ : state) benchmark::DoNotOptimize(boundary_f(a, b, 1));
}
BENCHMARK(BM_BoundaryF)->Arg(32)->Arg(128);
