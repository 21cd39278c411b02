#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cutguard {

// One frame's flat feature vector with its position in the stream.
struct FrameEmbedding {
    std::uint32_t frame_index = 0;
    std::vector<float> values;

    std::size_t dim() const noexcept { return values.size(); }
};

// Row-major binary mask; bits holds one byte per pixel, each 0 or 1.
struct BinaryMask {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> bits;

    std::size_t pixel_count() const noexcept { return bits.size(); }

    std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    void set(std::uint32_t x, std::uint32_t y, std::uint8_t v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }

    std::size_t positive_count() const noexcept {
        std::size_t n = 0;
        for (auto b : bits) n += (b != 0);
        return n;
    }
    bool empty_mask() const noexcept { return positive_count() == 0; }

    static BinaryMask zeros(std::uint32_t w, std::uint32_t h) {
        return BinaryMask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
    }

    bool operator==(const BinaryMask&) const = default;
};

// Per-frame region label. Over a spliced sequence, labels form contiguous runs
// in the order Prefix, Interjection, Suffix (or the sequence is all Clean).
enum class Region : char {
    Prefix = 'P',
    Interjection = 'I',
    Suffix = 'S',
    Clean = 'C',
};

inline char region_char(Region r) { return static_cast<char>(r); }
Region region_from_char(char c); // throws ConfigInvalid on unknown char

} // namespace cutguard
