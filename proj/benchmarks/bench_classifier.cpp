#include <benchmark/benchmark.h>

#include "cutguard/classifier.hpp"
#include "cutguard/dataset.hpp"
#include "cutguard/memory_gate.hpp"

using namespace cutguard;

namespace {

SplicedSequence sample_of(std::uint32_t interjection_len) {
    SynthSpec spec;
    spec.interjection_len = interjection_len;
    spec.seed = 9;
    return synth_sample(spec);
}

} // namespace

static void BM_ClassifyStream(benchmark::State& state) {
    const SplicedSequence sample = sample_of(static_cast<std::uint32_t>(state.range(0)));
    const ClassifierConfig config = preset("cutie");
    for (auto _ : state) benchmark::DoNotOptimize(classify_stream(sample.embeddings, config));
    state.SetItemsProcessed(state.iterations() * (sample.embeddings.size() - 1));
}
BENCHMARK(BM_ClassifyStream)->Arg(16)->Arg(128)->Arg(512);

static void BM_DetectAndGate(benchmark::State& state) {
    const SplicedSequence sample = sample_of(128);
    const ClassifierConfig config = preset("cutie");
    for (auto _ : state) {
        const auto verdicts = classify_stream(sample.embeddings, config);
        benchmark::DoNotOptimize(run_gate(sample.embeddings, verdicts, 5));
    }
    state.SetItemsProcessed(state.iterations() * (sample.embeddings.size() - 1));
}
BENCHMARK(BM_DetectAndGate);
