#include <doctest.h>

#include <cmath>
#include <random>

#include "cutguard/distance.hpp"
#include "cutguard/errors.hpp"

using namespace cutguard;

namespace {

FrameEmbedding frame(std::uint32_t index, std::vector<float> values) {
    FrameEmbedding f;
    f.frame_index = index;
    f.values = std::move(values);
    return f;
}

// Independent oracle: plain Euclidean distance, explicit loop.
double plain_l2(const FrameEmbedding& x, const std::vector<double>& mean) {
    double acc = 0.0;
    for (std::size_t d = 0; d < x.values.size(); ++d) {
        const double diff = static_cast<double>(x.values[d]) - mean[d];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("window stats over [1,1],[3,3] with w=2") {
    const std::vector<FrameEmbedding> history = {frame(0, {1, 1}), frame(1, {3, 3})};
    const WindowStats stats = window_stats(history, 2);
    CHECK(stats.effective_window == 2);
    CHECK(stats.mean == std::vector<double>{2.0, 2.0});
    // population variance: ((1-2)^2 + (3-2)^2) / 2 = 1
    CHECK(stats.variance == std::vector<double>{1.0, 1.0});
}

TEST_CASE("single-frame window uses the intermediate size") {
    const std::vector<FrameEmbedding> history = {frame(0, {5, 7})};
    const WindowStats stats = window_stats(history, 5);
    CHECK(stats.effective_window == 1);
    CHECK(stats.mean == std::vector<double>{5.0, 7.0});
    CHECK(stats.variance == std::vector<double>{0.0, 0.0});
}

TEST_CASE("constant history has zero variance for any window") {
    const std::vector<FrameEmbedding> history = {frame(0, {2, 2}), frame(1, {2, 2}),
                                                 frame(2, {2, 2})};
    for (std::size_t w : {1, 2, 3, 5}) {
        const WindowStats stats = window_stats(history, w);
        CHECK(stats.variance == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("window stats error paths") {
    CHECK_THROWS_AS(window_stats({}, 5), EmptyHistory);
    const std::vector<FrameEmbedding> bad = {frame(0, {1, 2}), frame(1, {1, 2, 3})};
    CHECK_THROWS_AS(window_stats(bad, 2), DimMismatch);
}

TEST_CASE("regularized distance with unit variance is 2*sqrt(2)") {
    WindowStats stats{{2.0, 2.0}, {1.0, 1.0}, 2};
    const double d = regularized_distance(frame(2, {4, 4}), stats, {});
    CHECK(d == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("distance is zero iff the frame equals the window mean") {
    WindowStats stats{{3.0, -1.0}, {0.5, 4.0}, 3};
    CHECK(regularized_distance(frame(0, {3.0f, -1.0f}), stats, {}) == 0.0);
    CHECK(regularized_distance(frame(0, {3.0f, -0.5f}), stats, {}) > 0.0);
}

TEST_CASE("all-zero variance degrades to the plain L2 distance") {
    WindowStats stats{{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 1};
    const FrameEmbedding x = frame(0, {4.0f, 6.0f, 3.0f});
    const double d = regularized_distance(x, stats, {});
    CHECK(d == doctest::Approx(plain_l2(x, stats.mean)).epsilon(1e-12));
}

TEST_CASE("regularized distance rejects dim mismatch") {
    WindowStats stats{{1.0}, {1.0}, 1};
    CHECK_THROWS_AS(regularized_distance(frame(0, {1, 2}), stats, {}), DimMismatch);
}

TEST_CASE("stream distances over a constant stream are zero") {
    const std::vector<FrameEmbedding> frames = {frame(0, {1, 1}), frame(1, {1, 1}),
                                                frame(2, {1, 1})};
    const auto distances = stream_distances(frames, {5, 1e-6});
    CHECK(distances == std::vector<double>{0.0, 0.0});
}

TEST_CASE("zero-variance window falls back to sigma=1 in a stream") {
    // Window for frame 2 is {0, 0}: mean 0, variance 0, so the distance is 10.
    const std::vector<FrameEmbedding> frames = {frame(0, {0}), frame(1, {0}), frame(2, {10})};
    const auto distances = stream_distances(frames, {2, 1e-6});
    REQUIRE(distances.size() == 2);
    CHECK(distances[0] == 0.0);
    CHECK(distances[1] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("stream output has length L-1 and rejects short streams") {
    std::vector<FrameEmbedding> frames;
    for (std::uint32_t i = 0; i < 17; ++i) frames.push_back(frame(i, {float(i), 1.0f}));
    CHECK(stream_distances(frames, {5, 1e-6}).size() == 16);
    CHECK_THROWS_AS(stream_distances({frames.data(), 1}, DistanceConfig{}), TooShort);
}

TEST_CASE("unit variance reduces to plain Euclidean distance on random inputs") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<float> dist(-5.0f, 5.0f);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 1 + rng() % 32;
        WindowStats stats;
        stats.effective_window = 4;
        FrameEmbedding x;
        for (std::size_t d = 0; d < dim; ++d) {
            stats.mean.push_back(dist(rng));
            stats.variance.push_back(1.0);
            x.values.push_back(dist(rng));
        }
        const double got = regularized_distance(x, stats, {});
        const double want = plain_l2(x, stats.mean);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("scaling the deviation scales the distance by the same factor") {
    // Dyadic values keep mean + t*(x - mean) exactly representable in float,
    // so the scaling law can be checked well inside the 1e-6 contract.
    std::mt19937 rng(17);
    auto dyadic = [&] { return static_cast<double>(static_cast<int>(rng() % 512)) / 64.0; };
    const double ts[] = {0.0, 0.5, 1.0, 2.0, 4.0};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 1 + rng() % 16;
        WindowStats stats;
        FrameEmbedding x;
        for (std::size_t d = 0; d < dim; ++d) {
            stats.mean.push_back(dyadic());
            stats.variance.push_back(dyadic() + 0.015625);
            x.values.push_back(static_cast<float>(dyadic()));
        }
        stats.effective_window = 5;
        const double t = ts[rng() % 5];
        FrameEmbedding scaled;
        for (std::size_t d = 0; d < dim; ++d)
            scaled.values.push_back(static_cast<float>(
                stats.mean[d] + t * (static_cast<double>(x.values[d]) - stats.mean[d])));

        const double base = regularized_distance(x, stats, {});
        const double got = regularized_distance(scaled, stats, {});
        if (base > 0.0)
            CHECK(got == doctest::Approx(t * base).epsilon(1e-6));
        else
            CHECK(got == 0.0);
    }
}

TEST_CASE("tiny nonzero variances are floored, zero variances are not") {
    // variance 1e-20 -> sigma 1e-10, floored to 1e-6; variance 0 -> sigma 1.
    WindowStats stats{{0.0, 0.0}, {1e-20, 0.0}, 3};
    const DistanceConfig cfg{3, 1e-6};
    FrameEmbedding x;
    x.values = {1e-3f, 0.0f};
    const double d = regularized_distance(x, stats, cfg);
    CHECK(d == doctest::Approx(1e-3 / 1e-6).epsilon(1e-6)); // 1000, not 1e7
    FrameEmbedding y;
    y.values = {0.0f, 1e-3f};
    CHECK(regularized_distance(y, stats, cfg) == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("stream distances are deterministic") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<FrameEmbedding> frames;
    for (std::uint32_t i = 0; i < 40; ++i) {
        FrameEmbedding f;
        f.frame_index = i;
        for (int d = 0; d < 8; ++d) f.values.push_back(dist(rng));
        frames.push_back(std::move(f));
    }
    CHECK(stream_distances(frames, {5, 1e-6}) == stream_distances(frames, {5, 1e-6}));
}
