#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "cutguard/errors.hpp"
#include "cutguard/sequence_io.hpp"

using namespace cutguard;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "cutguard_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

FrameEmbedding frame(std::uint32_t index, std::vector<float> values) {
    FrameEmbedding f;
    f.frame_index = index;
    f.values = std::move(values);
    return f;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("sequence round-trip of a two-frame dim-2 stream") {
    const fs::path path = temp_file("basic.bin");
    const std::vector<FrameEmbedding> frames = {frame(0, {1.0f, 2.0f}), frame(1, {3.0f, 4.0f})};
    write_sequence(path, frames);

    CHECK(fs::file_size(path) == 16 + 4 * 2 * 2);
    const auto back = read_sequence(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].frame_index == 0);
    CHECK(back[1].frame_index == 1);
    CHECK(back[0].values == std::vector<float>{1.0f, 2.0f});
    CHECK(back[1].values == std::vector<float>{3.0f, 4.0f});
}

TEST_CASE("empty sequence file is 16 bytes and reads back empty") {
    const fs::path path = temp_file("empty.bin");
    write_sequence(path, {});
    CHECK(fs::file_size(path) == 16);
    CHECK(read_sequence(path).empty());
}

TEST_CASE("truncated sequence file is rejected") {
    const fs::path path = temp_file("trunc.bin");
    const std::vector<FrameEmbedding> frames = {frame(0, {1.0f, 2.0f}), frame(1, {3.0f, 4.0f})};
    write_sequence(path, frames);
    fs::resize_file(path, 17); // 16 + 4*2*2 = 32 expected
    CHECK_THROWS_AS(read_sequence(path), TruncatedFile);
}

TEST_CASE("huge frame_count with a short file fails the length check") {
    const fs::path path = temp_file("huge_count.bin");
    std::string bytes(16, '\0');
    std::memcpy(bytes.data(), kSequenceMagic, 8);
    bytes[8] = 4; // dim = 4
    bytes[12] = static_cast<char>(0xFF);
    bytes[13] = static_cast<char>(0xFF);
    bytes[14] = static_cast<char>(0xFF);
    bytes[15] = static_cast<char>(0xFF);
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(read_sequence(path), TruncatedFile);
}

TEST_CASE("wrong magic is rejected") {
    const fs::path path = temp_file("magic.bin");
    std::ofstream(path, std::ios::binary) << "NOTMAGIC" << std::string(8, '\0');
    CHECK_THROWS_AS(read_sequence(path), BadMagic);
}

TEST_CASE("NaN payload is rejected at read time") {
    const fs::path path = temp_file("nan.bin");
    const std::vector<FrameEmbedding> one = {frame(0, {1.0f})};
    write_sequence(path, one);
    std::string bytes = slurp(path);
    // Overwrite the single float with a quiet NaN, little-endian 0x7FC00000.
    bytes[16] = '\x00';
    bytes[17] = '\x00';
    bytes[18] = '\xC0';
    bytes[19] = '\x7F';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    CHECK_THROWS_AS(read_sequence(path), NonFiniteValue);
}

TEST_CASE("mixed dims and index gaps are write errors") {
    const fs::path path = temp_file("bad_write.bin");
    const std::vector<FrameEmbedding> mixed = {frame(0, {1.0f, 2.0f}), frame(1, {1.0f, 2.0f, 3.0f})};
    CHECK_THROWS_AS(write_sequence(path, mixed), DimMismatch);
    const std::vector<FrameEmbedding> gapped = {frame(0, {1.0f}), frame(2, {2.0f})};
    CHECK_THROWS_AS(write_sequence(path, gapped), IndexGap);
}

TEST_CASE("random sequences round-trip bit-for-bit") {
    const fs::path path = temp_file("random.bin");
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> dist(-100.0f, 100.0f);
    std::vector<FrameEmbedding> frames;
    for (std::uint32_t i = 0; i < 100; ++i) {
        FrameEmbedding f;
        f.frame_index = i;
        for (int d = 0; d < 64; ++d) f.values.push_back(dist(rng));
        frames.push_back(std::move(f));
    }
    write_sequence(path, frames);
    const auto back = read_sequence(path);
    REQUIRE(back.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        REQUIRE(back[i].values.size() == frames[i].values.size());
        for (std::size_t d = 0; d < frames[i].values.size(); ++d) {
            std::uint32_t a, b;
            std::memcpy(&a, &frames[i].values[d], 4);
            std::memcpy(&b, &back[i].values[d], 4);
            CHECK(a == b);
        }
    }
}

TEST_CASE("2x2 all-ones mask packs to 0xF0, high bit first") {
    const fs::path path = temp_file("ones.msk");
    BinaryMask m{2, 2, {1, 1, 1, 1}};
    write_masks(path, std::vector<BinaryMask>{m});
    const std::string bytes = slurp(path);
    REQUIRE(bytes.size() == 21); // 20-byte header + 1 payload byte
    CHECK(static_cast<unsigned char>(bytes[20]) == 0xF0);
    const auto back = read_masks(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == m);
}

TEST_CASE("zero masks produce a header-only file") {
    const fs::path path = temp_file("zero.msk");
    write_masks(path, {});
    CHECK(fs::file_size(path) == 20); // magic + width + height + frame_count
    CHECK(read_masks(path).empty());
}

TEST_CASE("zero-width masks are rejected at write time") {
    const fs::path path = temp_file("badmask.msk");
    BinaryMask m{0, 2, {}};
    CHECK_THROWS_AS(write_masks(path, std::vector<BinaryMask>{m}), DimMismatch);
}

TEST_CASE("masks with awkward sizes round-trip through byte padding") {
    const fs::path path = temp_file("padded.msk");
    std::mt19937 rng(11);
    std::vector<BinaryMask> masks;
    for (int i = 0; i < 20; ++i) {
        BinaryMask m = BinaryMask::zeros(5, 3); // 15 bits -> 2 bytes per frame
        for (auto& b : m.bits) b = rng() & 1;
        masks.push_back(std::move(m));
    }
    write_masks(path, masks);
    CHECK(fs::file_size(path) == 20 + 2 * masks.size());
    CHECK(read_masks(path) == masks);
}

TEST_CASE("corrupt mask files are rejected") {
    const fs::path path = temp_file("trunc.msk");
    write_masks(path, std::vector<BinaryMask>{BinaryMask::zeros(8, 8)});
    fs::resize_file(path, 22);
    CHECK_THROWS_AS(read_masks(path), TruncatedFile);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << "WRONG!!!";
    CHECK_THROWS_AS(read_masks(path), BadMagic);
}

TEST_CASE("region labels round-trip through the sidecar format") {
    const fs::path path = temp_file("labels.txt");
    const std::vector<Region> labels = {Region::Prefix, Region::Prefix, Region::Interjection,
                                        Region::Suffix, Region::Clean};
    write_labels(path, labels);
    CHECK(read_labels(path) == labels);
    CHECK_THROWS_AS(region_from_char('X'), ConfigInvalid);
}
