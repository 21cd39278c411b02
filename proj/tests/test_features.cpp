#include <doctest.h>

#include <algorithm>
#include <random>

#include "cutguard/dataset.hpp"
#include "cutguard/distance.hpp"
#include "cutguard/errors.hpp"
#include "cutguard/features.hpp"

using namespace cutguard;

namespace {

std::vector<FrameEmbedding> constant_stream(std::size_t n, std::size_t dim, float value) {
    std::vector<FrameEmbedding> frames;
    for (std::size_t i = 0; i < n; ++i) {
        FrameEmbedding f;
        f.frame_index = static_cast<std::uint32_t>(i);
        f.values.assign(dim, value);
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<FrameEmbedding> noisy_stream(std::size_t n, std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<FrameEmbedding> frames;
    for (std::size_t i = 0; i < n; ++i) {
        FrameEmbedding f;
        f.frame_index = static_cast<std::uint32_t>(i);
        for (std::size_t d = 0; d < dim; ++d) f.values.push_back(dist(rng));
        frames.push_back(std::move(f));
    }
    return frames;
}

} // namespace

TEST_CASE("first-order ratio and difference") {
    const FirstOrder fo = first_order(2.14, 2.0);
    CHECK(fo.ratio == doctest::Approx(1.07).epsilon(1e-9));
    CHECK(fo.diff == doctest::Approx(0.14).epsilon(1e-9));

    const FirstOrder steady = first_order(3.5, 3.5);
    CHECK(steady.ratio == 1.0);
    CHECK(steady.diff == 0.0);

    // epsilon guard on the division
    const FirstOrder guarded = first_order(5.0, 0.0);
    CHECK(guarded.ratio == doctest::Approx(5e9).epsilon(1e-9));
    CHECK(guarded.diff == 5.0);
}

TEST_CASE("maximum distance ratio updates") {
    MdrState state{4.0, 3};
    const MdrUpdate up = update_mdr(state, 5.0);
    CHECK(up.mdr == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(up.state.max_distance_seen == 5.0);
    CHECK(up.state.initialized_from == 4);

    // a repeat of the maximum sits at exactly 1
    CHECK(update_mdr({5.0, 4}, 5.0).mdr == doctest::Approx(1.0).epsilon(1e-12));

    // first observed distance divides by the epsilon guard
    const MdrUpdate first = update_mdr({}, 3.0);
    CHECK(first.mdr == doctest::Approx(3e9).epsilon(1e-9));
    CHECK(first.state.max_distance_seen == 3.0);
    CHECK(first.state.initialized_from == 1);
}

TEST_CASE("MDR threshold schedule") {
    CHECK(mdrt(0) == doctest::Approx(0.86).epsilon(1e-15));
    CHECK(mdrt(120) == 0.50);
    CHECK(mdrt(60) == doctest::Approx(0.68).epsilon(1e-12));
    for (std::uint32_t l = 120; l < 600; ++l) CHECK(mdrt(l) == 0.50);
    for (std::uint32_t l = 0; l <= 120; ++l) {
        const double linear = 0.86 - 0.003 * static_cast<double>(l);
        CHECK(std::abs(mdrt(l) - std::max(linear, 0.50)) <= 1e-12);
    }
    for (std::uint32_t l = 1; l < 400; ++l) CHECK(mdrt(l) <= mdrt(l - 1));
}

TEST_CASE("constant stream produces null features") {
    const auto frames = constant_stream(10, 4, 2.5f);
    const auto features = featurize_stream(frames);
    REQUIRE(features.size() == 9);
    for (const auto& f : features) {
        CHECK(f.st0 == 0.0);
        CHECK(f.lt0 == 0.0);
        CHECK(f.st1_diff == 0.0);
        CHECK(f.run_length == 0);
    }
    CHECK_FALSE(features[0].first_order_valid);
    CHECK(features[1].first_order_valid);
    CHECK_FALSE(features[0].mdr_valid);
    CHECK(features[1].mdr_valid);
}

TEST_CASE("featurize_stream length and error contracts") {
    const auto frames = constant_stream(8, 2, 0.0f);
    CHECK(featurize_stream(frames).size() == 7);
    CHECK_THROWS_AS(featurize_stream({frames.data(), 1}), TooShort);
    const std::vector<bool> bad_feedback(3, false);
    CHECK_THROWS_AS(featurize_stream(frames, {}, bad_feedback), LengthMismatch);
}

TEST_CASE("clean-feedback features agree with the distance module streams") {
    const auto frames = noisy_stream(40, 8, 99);
    const auto features = featurize_stream(frames);
    const auto short_d = stream_distances(frames, {1, 1e-6});
    const auto long_d = stream_distances(frames, {5, 1e-6});
    REQUIRE(features.size() == short_d.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        CHECK(features[i].st0 == doctest::Approx(short_d[i]).epsilon(1e-12));
        CHECK(features[i].lt0 == doctest::Approx(long_d[i]).epsilon(1e-12));
    }
}

TEST_CASE("running maximum matches a direct maximum over the distance stream") {
    const auto frames = noisy_stream(60, 6, 1234);
    FeatureStream fs{FeatureConfig{}};
    fs.prime(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        fs.step(frames[i]);
        fs.feedback(false);
    }
    const auto long_d = stream_distances(frames, {5, 1e-6});
    const double direct_max = *std::max_element(long_d.begin(), long_d.end());
    CHECK(fs.mdr_state_long().max_distance_seen == doctest::Approx(direct_max).epsilon(1e-12));
    CHECK(fs.mdr_state_long().initialized_from == frames.size() - 1);
}

TEST_CASE("boundary frame of a spliced stream carries mdr above 1") {
    SynthSpec spec;
    spec.dim = 16;
    spec.interjection_len = 4;
    spec.seed = 5;
    const SplicedSequence sample = synth_sample(spec);

    std::vector<bool> feedback;
    for (std::size_t i = 1; i < sample.labels.size(); ++i)
        feedback.push_back(sample.labels[i] == Region::Interjection);
    const auto features = featurize_stream(sample.embeddings, {}, feedback);

    const std::size_t boundary = spec.prefix_len; // first interjection frame
    const FrameFeatures& bf = features[boundary - 1];
    CHECK(bf.mdr > 1.0);

    // Oracle: the boundary's long distance exceeds every prior long distance.
    FeatureConfig cfg;
    const auto long_d = stream_distances(sample.embeddings, {cfg.window_long, cfg.variance_floor});
    const double prior_max = *std::max_element(long_d.begin(), long_d.begin() + (boundary - 1));
    CHECK(bf.lt0 > prior_max);
    CHECK(bf.mdr == doctest::Approx(bf.lt0 / prior_max).epsilon(1e-9));
}

TEST_CASE("run_length counts trailing interjection feedback") {
    const auto frames = constant_stream(10, 2, 1.0f);
    //                     frames:   1  2  3  4  5  6  7  8  9
    const std::vector<bool> fb = {false, true, true, true, false, true, false, false, true};
    const auto features =
        featurize_stream(frames, {}, fb);
    const std::vector<std::uint32_t> want_run = {0, 0, 1, 2, 3, 0, 1, 0, 0};
    for (std::size_t i = 0; i < features.size(); ++i) CHECK(features[i].run_length == want_run[i]);
}

TEST_CASE("interjection feedback freezes the window and comparison registers") {
    // 4 steady frames, a big jump, then a return to the steady value.
    std::vector<FrameEmbedding> frames = constant_stream(4, 2, 1.0f);
    FrameEmbedding jump;
    jump.frame_index = 4;
    jump.values = {9.0f, 9.0f};
    frames.push_back(jump);
    FrameEmbedding back;
    back.frame_index = 5;
    back.values = {1.0f, 1.0f};
    frames.push_back(back);

    const std::vector<bool> fb = {false, false, false, true, false};
    const auto features =
        featurize_stream(frames, {}, fb);

    // Frame 5 is compared against the pre-jump history, not the jump frame.
    CHECK(features[4].st0 == 0.0);
    CHECK(features[3].st0 > 0.0);

    // Under IncludeAll the jump enters the window instead.
    FeatureConfig include_all;
    include_all.policy = WindowPolicy::IncludeAll;
    const auto features_all =
        featurize_stream(frames, include_all, fb);
    CHECK(features_all[4].st0 > 0.0);
}

TEST_CASE("freeze_max_during_interjection leaves the maximum at the clean level") {
    std::vector<FrameEmbedding> frames = constant_stream(4, 2, 1.0f);
    FrameEmbedding jump;
    jump.frame_index = 4;
    jump.values = {9.0f, 9.0f};
    frames.push_back(jump);

    const std::vector<bool> fb = {false, false, false, true};

    FeatureConfig freeze;
    freeze.freeze_max_during_interjection = true;
    FeatureStream fs(freeze);
    fs.prime(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        fs.step(frames[i]);
        fs.feedback(fb[i - 1]);
    }
    CHECK(fs.mdr_state_long().max_distance_seen == 0.0); // clean frames were all constant

    FeatureStream fs_default{FeatureConfig{}};
    fs_default.prime(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        fs_default.step(frames[i]);
        fs_default.feedback(fb[i - 1]);
    }
    CHECK(fs_default.mdr_state_long().max_distance_seen > 0.0);
}

TEST_CASE("featurize_stream is deterministic under identical feedback") {
    const auto frames = noisy_stream(30, 5, 77);
    std::vector<bool> fb(29, false);
    fb[10] = fb[11] = fb[12] = true;
    const auto a = featurize_stream(frames, {}, fb);
    const auto b = featurize_stream(frames, {}, fb);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].st0 == b[i].st0);
        CHECK(a[i].lt0 == b[i].lt0);
        CHECK(a[i].mdr == b[i].mdr);
        CHECK(a[i].run_length == b[i].run_length);
    }
}
