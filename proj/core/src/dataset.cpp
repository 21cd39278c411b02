#include "cutguard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cutguard/errors.hpp"
#include "cutguard/sequence_io.hpp"

namespace cutguard {
namespace {

// splitmix64; fixed here so corpora are byte-identical across platforms.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller, one value per call (the sine branch is discarded so the
    // stream does not depend on caller parity).
    double next_normal() {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Per-frame drift increment of scale `step`: a fixed-magnitude random-sign
    // component plus jitter. Consecutive frames always move by about one step
    // per element, which keeps trailing-window variances bounded away from
    // zero; pure Gaussian increments make degenerate windows routine and blow
    // up the element-wise z-scores on clean frames.
    double next_drift(double step) { return step * ((next_double() < 0.5 ? 1.0 : -1.0) + 0.25 * next_normal()); }
};

BinaryMask rect_mask(std::uint32_t width, std::uint32_t height, std::uint32_t rw,
                     std::uint32_t rh, std::uint32_t x0, std::uint32_t y0) {
    BinaryMask m = BinaryMask::zeros(width, height);
    for (std::uint32_t y = y0; y < std::min(y0 + rh, height); ++y)
        for (std::uint32_t x = x0; x < std::min(x0 + rw, width); ++x) m.set(x, y, 1);
    return m;
}

// Ground-truth object of video a: a rectangle drifting one pixel per frame.
BinaryMask object_mask(std::uint32_t width, std::uint32_t height, std::uint32_t frame) {
    const std::uint32_t rw = std::max(2u, width / 5);
    const std::uint32_t rh = std::max(2u, height / 5);
    const std::uint32_t x0 = (2 + frame) % std::max(1u, width - rw);
    const std::uint32_t y0 = (3 + frame / 2) % std::max(1u, height - rh);
    return rect_mask(width, height, rw, rh, x0, y0);
}

std::uint64_t manifest_seed(const nlohmann::json& j, const char* key) {
    return j.value(key, std::uint64_t{0});
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    Rng rng(seed ^ (salt * 0xA24BAED4963EE407ull + 0x9FB21C651E98DF25ull));
    return rng.next_u64();
}

SplicedSequence splice(const SpliceSpec& spec, const SourceSequence& a, const SourceSequence& b) {
    const std::uint32_t p = spec.prefix_len;
    const std::uint32_t s = spec.suffix_len;
    const std::uint32_t L = spec.interjection_len;
    if (p == 0 || s == 0) throw InvalidSpec("prefix_len and suffix_len must be positive");
    if (a.embeddings.size() < static_cast<std::size_t>(p) + s)
        throw SourceTooShort("source a has " + std::to_string(a.embeddings.size()) +
                             " frames, needs " + std::to_string(p + s));
    if (b.embeddings.size() < L)
        throw SourceTooShort("source b has " + std::to_string(b.embeddings.size()) +
                             " frames, needs " + std::to_string(L));

    const std::size_t dim = a.embeddings[0].dim();
    for (const auto& f : a.embeddings)
        if (f.dim() != dim) throw DimMismatch("source a frames disagree on dim");
    for (std::uint32_t i = 0; i < L; ++i)
        if (b.embeddings[i].dim() != dim)
            throw DimMismatch("source b dim differs from source a");

    const bool with_masks = !a.masks.empty();
    if (with_masks && a.masks.size() < static_cast<std::size_t>(p) + s)
        throw SourceTooShort("source a has fewer masks than frames required");

    SplicedSequence out;
    const std::uint32_t total = p + L + s;
    out.embeddings.reserve(total);
    out.labels.reserve(total);
    if (with_masks) out.masks.reserve(total);

    auto push = [&](const FrameEmbedding& src, Region label, const BinaryMask* mask) {
        FrameEmbedding f = src;
        f.frame_index = static_cast<std::uint32_t>(out.embeddings.size());
        out.embeddings.push_back(std::move(f));
        out.labels.push_back(label);
        if (with_masks) {
            if (mask)
                out.masks.push_back(*mask);
            else
                out.masks.push_back(BinaryMask::zeros(a.masks[0].width, a.masks[0].height));
        }
    };

    const bool clean = L == 0;
    for (std::uint32_t i = 0; i < p; ++i)
        push(a.embeddings[i], clean ? Region::Clean : Region::Prefix,
             with_masks ? &a.masks[i] : nullptr);
    for (std::uint32_t i = 0; i < L; ++i)
        push(b.embeddings[i], Region::Interjection, nullptr); // object absent: zero mask
    for (std::uint32_t i = 0; i < s; ++i)
        push(a.embeddings[p + i], clean ? Region::Clean : Region::Suffix,
             with_masks ? &a.masks[p + i] : nullptr);
    return out;
}

SplicedSequence synth_sample(const SynthSpec& spec) {
    if (spec.dim == 0) throw InvalidSpec("dim must be positive");
    if (spec.prefix_len == 0 || spec.suffix_len == 0)
        throw InvalidSpec("prefix_len and suffix_len must be positive");
    if (spec.cross_video_gap <= 0.0) throw InvalidSpec("cross_video_gap must be > 0");
    if (spec.within_video_step < 0.0) throw InvalidSpec("within_video_step must be >= 0");
    if (spec.mask_width == 0 || spec.mask_height == 0)
        throw InvalidSpec("mask dimensions must be positive");

    const std::uint32_t p = spec.prefix_len;
    const std::uint32_t s = spec.suffix_len;
    const std::uint32_t L = spec.interjection_len;

    // Map an optional spike from spliced-output coordinates into a's timeline.
    std::optional<std::uint32_t> spike_a_index;
    double spike_magnitude = 0.0;
    if (spec.pan_spike) {
        const std::uint32_t idx = spec.pan_spike->frame_index;
        if (idx < p)
            spike_a_index = idx;
        else if (idx >= p + L && idx < p + L + s)
            spike_a_index = idx - L;
        else
            throw InvalidSpec("pan_spike frame " + std::to_string(idx) +
                              " does not land in a clean region");
        if (*spike_a_index == 0) throw InvalidSpec("pan_spike cannot land on frame 0");
        spike_magnitude = spec.pan_spike->magnitude;
    }

    Rng rng_a(mix_seed(spec.seed, 1));
    Rng rng_b(mix_seed(spec.seed, 2));

    SourceSequence a;
    std::vector<double> pos(spec.dim);
    for (auto& v : pos) v = rng_a.next_double();
    for (std::uint32_t t = 0; t < p + s; ++t) {
        if (t > 0)
            for (auto& v : pos) v += rng_a.next_drift(spec.within_video_step);
        if (spike_a_index && t == *spike_a_index)
            for (auto& v : pos) v += spike_magnitude * spec.within_video_step;
        FrameEmbedding f;
        f.frame_index = t;
        f.values.resize(spec.dim);
        for (std::size_t d = 0; d < pos.size(); ++d) f.values[d] = static_cast<float>(pos[d]);
        a.embeddings.push_back(std::move(f));
        a.masks.push_back(object_mask(spec.mask_width, spec.mask_height, t));
    }

    SourceSequence b;
    std::vector<double> pos_b(spec.dim);
    {
        // b starts one gap away from a's base, element-wise.
        Rng rng_a_base(mix_seed(spec.seed, 1));
        for (auto& v : pos_b) v = rng_a_base.next_double() + spec.cross_video_gap;
    }
    for (std::uint32_t t = 0; t < L; ++t) {
        if (t > 0)
            for (auto& v : pos_b) v += rng_b.next_drift(spec.within_video_step);
        FrameEmbedding f;
        f.frame_index = t;
        f.values.resize(spec.dim);
        for (std::size_t d = 0; d < pos_b.size(); ++d) f.values[d] = static_cast<float>(pos_b[d]);
        b.embeddings.push_back(std::move(f));
    }

    SpliceSpec splice_spec;
    splice_spec.prefix_len = p;
    splice_spec.suffix_len = s;
    splice_spec.interjection_len = L;
    splice_spec.seed = spec.seed;
    return splice(splice_spec, a, b);
}

std::vector<SplicedSequence> synth_corpus(const SynthSpec& spec, std::size_t n_samples) {
    if (n_samples == 0) throw InvalidSpec("n_samples must be positive");
    std::vector<SplicedSequence> out;
    out.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        SynthSpec sample_spec = spec;
        sample_spec.seed = mix_seed(spec.seed, 0x5A17u + k);
        out.push_back(synth_sample(sample_spec));
    }
    return out;
}

std::vector<BinaryMask> simulated_predictions(const SplicedSequence& sample) {
    if (sample.masks.size() != sample.embeddings.size())
        throw LengthMismatch("sample has no aligned ground-truth masks");
    std::vector<BinaryMask> preds;
    preds.reserve(sample.masks.size());
    for (std::size_t i = 0; i < sample.masks.size(); ++i) {
        if (sample.labels[i] == Region::Interjection) {
            const std::uint32_t w = sample.masks[i].width;
            const std::uint32_t h = sample.masks[i].height;
            const std::uint32_t rw = std::max(2u, w / 4);
            const std::uint32_t rh = std::max(2u, h / 4);
            const auto fi = static_cast<std::uint32_t>(i);
            preds.push_back(rect_mask(w, h, rw, rh, (7 * fi) % std::max(1u, w - rw),
                                      (5 * fi) % std::max(1u, h - rh)));
        } else {
            preds.push_back(sample.masks[i]);
        }
    }
    return preds;
}

void write_sample_dir(const std::filesystem::path& dir, const CorpusSample& sample) {
    std::filesystem::create_directories(dir);
    write_sequence(dir / "emb.bin", sample.sequence.embeddings);
    if (!sample.sequence.masks.empty()) write_masks(dir / "mask.bin", sample.sequence.masks);
    if (!sample.predictions.empty()) write_masks(dir / "pred.bin", sample.predictions);
    write_labels(dir / "labels.txt", sample.sequence.labels);

    nlohmann::json j;
    j["id"] = sample.manifest.id;
    j["dim"] = sample.manifest.dim;
    j["prefix_len"] = sample.manifest.prefix_len;
    j["interjection_len"] = sample.manifest.interjection_len;
    j["suffix_len"] = sample.manifest.suffix_len;
    j["frame_count"] = sample.manifest.frame_count;
    j["seed"] = sample.manifest.seed;
    if (sample.manifest.within_video_step) j["within_video_step"] = *sample.manifest.within_video_step;
    if (sample.manifest.cross_video_gap) j["cross_video_gap"] = *sample.manifest.cross_video_gap;
    if (sample.manifest.pan_spike) {
        j["pan_spike"] = {{"frame_index", sample.manifest.pan_spike->frame_index},
                          {"magnitude", sample.manifest.pan_spike->magnitude}};
    }
    if (!sample.manifest.source_a.empty()) j["source_a"] = sample.manifest.source_a;
    if (!sample.manifest.source_b.empty()) j["source_b"] = sample.manifest.source_b;

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot open " + (dir / "manifest.json").string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed on " + (dir / "manifest.json").string());
}

CorpusSample read_sample_dir(const std::filesystem::path& dir) {
    CorpusSample sample;
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
    nlohmann::json j;
    in >> j;

    sample.manifest.id = j.value("id", dir.filename().string());
    sample.manifest.dim = j.value("dim", 0u);
    sample.manifest.prefix_len = j.value("prefix_len", 0u);
    sample.manifest.interjection_len = j.value("interjection_len", 0u);
    sample.manifest.suffix_len = j.value("suffix_len", 0u);
    sample.manifest.frame_count = j.value("frame_count", 0u);
    sample.manifest.seed = manifest_seed(j, "seed");
    if (j.contains("within_video_step"))
        sample.manifest.within_video_step = j["within_video_step"].get<double>();
    if (j.contains("cross_video_gap"))
        sample.manifest.cross_video_gap = j["cross_video_gap"].get<double>();
    if (j.contains("pan_spike")) {
        PanSpike spike;
        spike.frame_index = j["pan_spike"].value("frame_index", 0u);
        spike.magnitude = j["pan_spike"].value("magnitude", 0.0);
        sample.manifest.pan_spike = spike;
    }
    sample.manifest.source_a = j.value("source_a", std::string{});
    sample.manifest.source_b = j.value("source_b", std::string{});

    sample.sequence.embeddings = read_sequence(dir / "emb.bin");
    if (std::filesystem::exists(dir / "mask.bin"))
        sample.sequence.masks = read_masks(dir / "mask.bin");
    sample.sequence.labels = read_labels(dir / "labels.txt");
    if (std::filesystem::exists(dir / "pred.bin"))
        sample.predictions = read_masks(dir / "pred.bin");

    if (sample.sequence.labels.size() != sample.sequence.embeddings.size())
        throw LengthMismatch("label count does not match frame count in " + dir.string());
    if (!sample.sequence.masks.empty() &&
        sample.sequence.masks.size() != sample.sequence.embeddings.size())
        throw LengthMismatch("mask count does not match frame count in " + dir.string());
    return sample;
}

std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root)) throw IoError(root.string() + " is not a directory");
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

} // namespace cutguard
