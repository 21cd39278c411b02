#include <doctest.h>

#include <cmath>
#include <random>

#include "cutguard/errors.hpp"
#include "cutguard/metrics.hpp"

using namespace cutguard;

namespace {

BinaryMask rect(std::uint32_t w, std::uint32_t h, std::uint32_t x0, std::uint32_t y0,
                std::uint32_t rw, std::uint32_t rh) {
    BinaryMask m = BinaryMask::zeros(w, h);
    for (std::uint32_t y = y0; y < std::min(y0 + rh, h); ++y)
        for (std::uint32_t x = x0; x < std::min(x0 + rw, w); ++x) m.set(x, y, 1);
    return m;
}

BinaryMask random_mask(std::mt19937& rng, std::uint32_t w, std::uint32_t h, double density) {
    BinaryMask m = BinaryMask::zeros(w, h);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& b : m.bits) b = unit(rng) < density ? 1 : 0;
    return m;
}

// Counting oracle, explicit loops.
double jaccard_oracle(const BinaryMask& a, const BinaryMask& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] && b.bits[i]) ++inter;
        if (a.bits[i] || b.bits[i]) ++uni;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

// Brute-force contour oracle: quadratic scan over boundary pixel pairs.
double boundary_f_oracle(const BinaryMask& pred, const BinaryMask& truth,
                         std::uint32_t tolerance) {
    auto boundary_pixels = [](const BinaryMask& m) {
        std::vector<std::pair<int, int>> px;
        for (int y = 0; y < int(m.height); ++y)
            for (int x = 0; x < int(m.width); ++x) {
                if (!m.at(x, y)) continue;
                const bool edge = x == 0 || y == 0 || x + 1 == int(m.width) || y + 1 == int(m.height);
                if (edge || !m.at(x - 1, y) || !m.at(x + 1, y) || !m.at(x, y - 1) ||
                    !m.at(x, y + 1))
                    px.emplace_back(x, y);
            }
        return px;
    };
    const auto bp = boundary_pixels(pred);
    const auto bt = boundary_pixels(truth);
    if (bp.empty() && bt.empty()) return 1.0;
    if (bp.empty() || bt.empty()) return 0.0;

    auto matched = [&](const std::vector<std::pair<int, int>>& from,
                       const std::vector<std::pair<int, int>>& to) {
        std::size_t n = 0;
        for (const auto& [x, y] : from) {
            bool hit = false;
            for (const auto& [u, v] : to)
                if (std::max(std::abs(x - u), std::abs(y - v)) <= int(tolerance)) {
                    hit = true;
                    break;
                }
            n += hit;
        }
        return n;
    };
    const double precision = double(matched(bp, bt)) / double(bp.size());
    const double recall = double(matched(bt, bp)) / double(bt.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

SplicedSequence tiny_sample(std::uint32_t p, std::uint32_t L, std::uint32_t s) {
    SplicedSequence out;
    const std::uint32_t n = p + L + s;
    for (std::uint32_t i = 0; i < n; ++i) {
        FrameEmbedding f;
        f.frame_index = i;
        f.values = {float(i)};
        out.embeddings.push_back(std::move(f));
        const Region r = L == 0 ? Region::Clean
                         : i < p ? Region::Prefix
                         : i < p + L ? Region::Interjection
                                     : Region::Suffix;
        out.labels.push_back(r);
        out.masks.push_back(r == Region::Interjection ? BinaryMask::zeros(8, 8)
                                                      : rect(8, 8, 2, 2, 3, 3));
    }
    return out;
}

} // namespace

TEST_CASE("jaccard basics") {
    const BinaryMask a = rect(8, 8, 1, 1, 4, 4);
    CHECK(jaccard(a, a) == 1.0);
    const BinaryMask b = rect(8, 8, 5, 5, 2, 2); // disjoint
    CHECK(jaccard(a, b) == 0.0);

    // pred covers exactly half of truth, no extra pixels
    const BinaryMask truth = rect(8, 8, 0, 0, 4, 2);
    const BinaryMask half = rect(8, 8, 0, 0, 2, 2);
    CHECK(jaccard(half, truth) == 0.5);

    CHECK(jaccard(BinaryMask::zeros(4, 4), BinaryMask::zeros(4, 4)) == 1.0);
    CHECK_THROWS_AS(jaccard(BinaryMask::zeros(4, 4), BinaryMask::zeros(5, 4)), DimMismatch);
}

TEST_CASE("jaccard agrees exactly with the counting oracle on random masks") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t w = 1 + rng() % 32, h = 1 + rng() % 32;
        const BinaryMask a = random_mask(rng, w, h, 0.3);
        const BinaryMask b = random_mask(rng, w, h, 0.3);
        CHECK(jaccard(a, b) == jaccard_oracle(a, b));
        CHECK(jaccard(a, b) == jaccard(b, a));
        CHECK(jaccard(a, a) == 1.0);
    }
}

TEST_CASE("boundary F basics") {
    const BinaryMask a = rect(16, 16, 3, 3, 6, 6);
    CHECK(boundary_f(a, a, 1) == 1.0);
    CHECK(boundary_f(BinaryMask::zeros(16, 16), a, 1) == 0.0);
    CHECK(boundary_f(a, BinaryMask::zeros(16, 16), 1) == 0.0);
    CHECK(boundary_f(BinaryMask::zeros(16, 16), BinaryMask::zeros(16, 16), 1) == 1.0);

    // one-pixel shift: perfect at tolerance 1, imperfect at tolerance 0
    const BinaryMask shifted = rect(16, 16, 4, 3, 6, 6);
    CHECK(boundary_f(shifted, a, 1) == 1.0);
    CHECK(boundary_f(shifted, a, 0) < 1.0);
}

TEST_CASE("boundary F agrees with the brute-force oracle") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint32_t w = 2 + rng() % 20, h = 2 + rng() % 20;
        const std::uint32_t tol = rng() % 3;
        const BinaryMask a = random_mask(rng, w, h, 0.35);
        const BinaryMask b = random_mask(rng, w, h, 0.35);
        CHECK(boundary_f(a, b, tol) == doctest::Approx(boundary_f_oracle(a, b, tol)).epsilon(1e-9));
        CHECK(boundary_f(a, b, tol) == doctest::Approx(boundary_f(b, a, tol)).epsilon(1e-12));
    }
}

TEST_CASE("pixelwise F1 alternative") {
    const BinaryMask a = rect(8, 8, 0, 0, 4, 4);
    CHECK(pixel_f1(a, a) == 1.0);
    CHECK(pixel_f1(BinaryMask::zeros(8, 8), BinaryMask::zeros(8, 8)) == 1.0);
    CHECK(pixel_f1(BinaryMask::zeros(8, 8), a) == 0.0);
    const BinaryMask half = rect(8, 8, 0, 0, 4, 2);
    // tp=8, fp=0, fn=8 -> F1 = 16/24
    CHECK(pixel_f1(half, a) == doctest::Approx(2.0 * 8.0 / (2.0 * 8.0 + 0.0 + 8.0)).epsilon(1e-12));
}

TEST_CASE("false positive percentage") {
    std::vector<BinaryMask> zeros(3, BinaryMask::zeros(10, 10));
    CHECK(false_positive_pct(zeros) == 0.0);

    std::vector<BinaryMask> ones(2, BinaryMask{10, 10, std::vector<std::uint8_t>(100, 1)});
    CHECK(false_positive_pct(ones) == 100.0);

    BinaryMask thirteen = BinaryMask::zeros(10, 10);
    for (int i = 0; i < 13; ++i) thirteen.bits[static_cast<std::size_t>(i) * 7] = 1;
    std::vector<BinaryMask> one_frame = {thirteen};
    CHECK(false_positive_pct(one_frame) == doctest::Approx(13.0).epsilon(1e-12));

    CHECK_THROWS_AS(false_positive_pct({}), EmptyRegion);
}

TEST_CASE("perfect gated predictions score a clean 100") {
    const SplicedSequence sample = tiny_sample(4, 6, 4);
    std::vector<BinaryMask> preds = sample.masks; // empty during interjection already
    const RegionReport report = evaluate_sample(sample, preds);
    CHECK(report.full_jf == 100.0);
    REQUIRE(report.interjection_fp_pct.has_value());
    CHECK(*report.interjection_fp_pct == 0.0);
    REQUIRE(report.suffix_jf.has_value());
    CHECK(*report.suffix_jf == 100.0);
    REQUIRE(report.prefix_jf.has_value());
    CHECK(*report.prefix_jf == 100.0);
}

TEST_CASE("empty predictions have zero FP but zero region scores") {
    const SplicedSequence sample = tiny_sample(4, 6, 4);
    std::vector<BinaryMask> preds(sample.masks.size(), BinaryMask::zeros(8, 8));
    const RegionReport report = evaluate_sample(sample, preds);
    CHECK(*report.interjection_fp_pct == 0.0);
    CHECK(*report.suffix_jf == 0.0);
    CHECK(*report.prefix_jf == 0.0);
    CHECK(report.full_jf < 100.0);
}

TEST_CASE("hallucinated interjection predictions cost FP and full score") {
    const SplicedSequence sample = tiny_sample(4, 6, 4);
    std::vector<BinaryMask> preds = sample.masks;
    for (std::size_t i = 4; i < 10; ++i) preds[i] = rect(8, 8, 0, 0, 2, 2); // nonzero inside
    const RegionReport report = evaluate_sample(sample, preds);
    CHECK(*report.interjection_fp_pct > 0.0);
    CHECK(report.full_jf < 100.0);
    CHECK(*report.suffix_jf == 100.0); // suffix untouched
}

TEST_CASE("clean samples report no region metrics") {
    const SplicedSequence sample = tiny_sample(12, 0, 12);
    const RegionReport report = evaluate_sample(sample, sample.masks);
    CHECK(report.full_jf == 100.0);
    CHECK_FALSE(report.interjection_fp_pct.has_value());
    CHECK_FALSE(report.suffix_jf.has_value());
    CHECK_FALSE(report.prefix_jf.has_value());
}

TEST_CASE("evaluate_sample rejects misaligned predictions") {
    const SplicedSequence sample = tiny_sample(4, 4, 4);
    std::vector<BinaryMask> preds(sample.masks.begin(), sample.masks.end() - 1);
    CHECK_THROWS_AS(evaluate_sample(sample, preds), LengthMismatch);
}

TEST_CASE("report tables order columns by length with clean first") {
    std::vector<ReportRow> rows;
    for (std::uint32_t len : {512u, 4u, 0u, 128u, 16u}) {
        ReportRow r;
        r.config = "demo";
        r.length = len;
        r.full_jf = 90.0;
        r.n_samples = 25;
        rows.push_back(r);
    }
    const std::string tables = format_tables(rows);
    const auto p0 = tables.find("0-frames (clean)");
    const auto p4 = tables.find("4-frames");
    const auto p16 = tables.find("16-frames");
    const auto p128 = tables.find("128-frames");
    const auto p512 = tables.find("512-frames");
    REQUIRE(p0 != std::string::npos);
    CHECK(p0 < p4);
    CHECK(p4 < p16);
    CHECK(p16 < p128);
    CHECK(p128 < p512);
}

TEST_CASE("empty report list renders header-only tables") {
    const std::string tables = format_tables({});
    CHECK(tables.find("Full Video Performance (J&F)") != std::string::npos);
    CHECK(tables.find("Interjection Performance (False Positive %)") != std::string::npos);
    CHECK(tables.find("Suffix Performance (J&F)") != std::string::npos);
}

TEST_CASE("csv carries the full column set") {
    ReportRow r;
    r.config = "cutie+";
    r.length = 16;
    r.full_jf = 100.0;
    r.fp_pct = 0.0;
    r.suffix_jf = 100.0;
    r.prefix_jf = 100.0;
    r.n_samples = 25;
    const std::string csv = format_csv(std::vector<ReportRow>{r});
    CHECK(csv.find("config,length,full_jf,fp_pct,suffix_jf,prefix_jf,n_samples") == 0);
    CHECK(csv.find("cutie+,16,100,0,100,100,25") != std::string::npos);

    ReportRow clean;
    clean.config = "baseline";
    clean.length = 0;
    clean.full_jf = 99.5;
    clean.n_samples = 25;
    const std::string csv2 = format_csv(std::vector<ReportRow>{clean});
    CHECK(csv2.find("baseline,0,99.5,,,,25") != std::string::npos);
}

TEST_CASE("aggregate averages over per-sample reports") {
    RegionReport a;
    a.full_jf = 90.0;
    a.interjection_fp_pct = 2.0;
    RegionReport b;
    b.full_jf = 100.0;
    b.interjection_fp_pct = 0.0;
    const ReportRow row = aggregate_reports("m", 4, std::vector<RegionReport>{a, b});
    CHECK(row.full_jf == doctest::Approx(95.0));
    CHECK(*row.fp_pct == doctest::Approx(1.0));
    CHECK(row.n_samples == 2);
    CHECK_FALSE(row.suffix_jf.has_value());
}
