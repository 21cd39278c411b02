#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cutguard/types.hpp"

namespace cutguard {

// A source embedding stream with (optionally) its per-frame object masks.
struct SourceSequence {
    std::vector<FrameEmbedding> embeddings;
    std::vector<BinaryMask> masks; // may be empty for embedding-only sources
};

struct SpliceSpec {
    std::uint32_t prefix_len = 12;
    std::uint32_t suffix_len = 12;
    std::uint32_t interjection_len = 4; // 0 builds a clean (unspliced) sample
    std::uint64_t seed = 0;             // recorded for reproducibility
};

// prefix + interjection + suffix streams with ground-truth region labels.
// Label runs are contiguous in the order Prefix, Interjection, Suffix, or the
// whole sequence is Clean when interjection_len == 0. Ground-truth masks over
// the interjection region are all-zero: the annotated object is absent there.
struct SplicedSequence {
    std::vector<FrameEmbedding> embeddings;
    std::vector<BinaryMask> masks;
    std::vector<Region> labels;
};

// The suffix continues source `a` directly: frames prefix_len ..
// prefix_len+suffix_len-1. Throws DimMismatch, SourceTooShort.
SplicedSequence splice(const SpliceSpec& spec, const SourceSequence& a, const SourceSequence& b);

// A jump injected at one clean frame, simulating a quick camera movement:
// a displacement of magnitude * within_video_step per element that the
// within-video drift then continues from.
struct PanSpike {
    std::uint32_t frame_index = 0; // index in the spliced output; must be clean
    double magnitude = 3.0;        // in units of within_video_step
};

struct SynthSpec {
    std::uint32_t dim = 64;
    std::uint32_t prefix_len = 12;
    std::uint32_t suffix_len = 12;
    std::uint32_t interjection_len = 4;
    double within_video_step = 0.05; // per-frame drift scale sigma_w
    double cross_video_gap = 0.5;    // per-element offset g between videos (L2 gap g*sqrt(dim))
    std::optional<PanSpike> pan_spike;
    std::uint64_t seed = 42;
    std::uint32_t mask_width = 32;
    std::uint32_t mask_height = 32;
};

// One spliced sample: video a is a seeded random walk from a uniform base,
// video b walks from base_a + gap per element. Masks are axis-aligned
// rectangles drifting with the frame index. Deterministic under seed.
// Throws InvalidSpec.
SplicedSequence synth_sample(const SynthSpec& spec);

// n_samples independent samples; sample k is generated from a seed mixed
// from (spec.seed, k), so corpora are stable under parallel generation.
std::vector<SplicedSequence> synth_corpus(const SynthSpec& spec, std::size_t n_samples);

// Stand-in for a VOS model's raw (ungated) predictions: clean-region frames
// get the ground-truth mask (the model tracks well on its own video), while
// interjection frames get a nonzero hallucinated blob - the wrong object the
// model would latch onto. Deterministic.
std::vector<BinaryMask> simulated_predictions(const SplicedSequence& sample);

// Sidecar manifest stored with each sample directory.
struct SampleManifest {
    std::string id;
    std::uint32_t dim = 0;
    std::uint32_t prefix_len = 0;
    std::uint32_t interjection_len = 0;
    std::uint32_t suffix_len = 0;
    std::uint32_t frame_count = 0;
    std::uint64_t seed = 0;
    std::optional<double> within_video_step;
    std::optional<double> cross_video_gap;
    std::optional<PanSpike> pan_spike;
    std::string source_a; // provenance for spliced-from-file samples
    std::string source_b;
};

struct CorpusSample {
    SampleManifest manifest;
    SplicedSequence sequence;
    std::vector<BinaryMask> predictions; // empty when pred.bin is absent
};

// Directory layout per sample:
//   <dir>/emb.bin      embedding stream (CUTGEMB1)
//   <dir>/mask.bin     ground-truth masks (CUTGMSK1)
//   <dir>/pred.bin     simulated/ungated predictions (CUTGMSK1, optional)
//   <dir>/labels.txt   one of P/I/S/C per line
//   <dir>/manifest.json
void write_sample_dir(const std::filesystem::path& dir, const CorpusSample& sample);
CorpusSample read_sample_dir(const std::filesystem::path& dir);

// Sample directories under a corpus root, sorted by name.
std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& root);

// Deterministic seed mixer for per-sample streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace cutguard
