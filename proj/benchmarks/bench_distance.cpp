#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cutguard/distance.hpp"

using namespace cutguard;

namespace {

std::vector<FrameEmbedding> make_stream(std::size_t frames, std::size_t dim) {
    std::mt19937 rng(1);
    std::normal_distribution<float> noise(0.0f, 0.05f);
    std::vector<FrameEmbedding> out(frames);
    std::vector<float> pos(dim, 0.5f);
    for (std::size_t i = 0; i < frames; ++i) {
        for (auto& v : pos) v += noise(rng);
        out[i].frame_index = static_cast<std::uint32_t>(i);
        out[i].values = pos;
    }
    return out;
}

} // namespace

static void BM_RegularizedDistance(benchmark::State& state) {
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    const auto stream = make_stream(8, dim);
    const WindowStats stats = window_stats({stream.data(), 5}, 5);
    const DistanceConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(regularized_distance(stream[6], stats, cfg));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RegularizedDistance)->Arg(64)->Arg(256)->Arg(1024);

static void BM_StreamDistances(benchmark::State& state) {
    const auto stream = make_stream(static_cast<std::size_t>(state.range(0)), 64);
    const DistanceConfig cfg{5, 1e-6};
    for (auto _ : state) benchmark::DoNotOptimize(stream_distances(stream, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StreamDistances)->Arg(128)->Arg(512);
