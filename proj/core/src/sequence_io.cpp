#include "cutguard/sequence_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "cutguard/errors.hpp"

namespace cutguard {
namespace {

void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32_le(std::string& out, float f) {
    static_assert(sizeof(float) == 4);
    std::uint32_t v = std::bit_cast<std::uint32_t>(f);
    put_u32_le(out, v);
}

float get_f32_le(const unsigned char* p) {
    return std::bit_cast<float>(get_u32_le(p));
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + path.string());
}

} // namespace

Region region_from_char(char c) {
    switch (c) {
        case 'P': return Region::Prefix;
        case 'I': return Region::Interjection;
        case 'S': return Region::Suffix;
        case 'C': return Region::Clean;
        default: throw ConfigInvalid(std::string("unknown region label '") + c + "'");
    }
}

std::vector<FrameEmbedding> read_sequence(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kSequenceMagic, 8) != 0)
        throw BadMagic(path.string() + " is not a CUTGEMB1 sequence file");

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t dim = get_u32_le(p + 8);
    const std::uint32_t frame_count = get_u32_le(p + 12);

    // Length check before any payload-sized allocation.
    const std::uint64_t expected = 16ull + 4ull * dim * frame_count;
    if (bytes.size() != expected)
        throw TruncatedFile(path.string() + ": expected " + std::to_string(expected) +
                            " bytes, found " + std::to_string(bytes.size()));

    std::vector<FrameEmbedding> frames;
    frames.reserve(frame_count);
    const unsigned char* cursor = p + 16;
    for (std::uint32_t i = 0; i < frame_count; ++i) {
        FrameEmbedding f;
        f.frame_index = i;
        f.values.resize(dim);
        for (std::uint32_t d = 0; d < dim; ++d, cursor += 4) {
            const float v = get_f32_le(cursor);
            if (!std::isfinite(v))
                throw NonFiniteValue(path.string() + ": frame " + std::to_string(i) +
                                     " element " + std::to_string(d));
            f.values[d] = v;
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

void write_sequence(const std::filesystem::path& path, std::span<const FrameEmbedding> frames) {
    const std::uint32_t dim = frames.empty() ? 0 : static_cast<std::uint32_t>(frames[0].dim());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].dim() != dim)
            throw DimMismatch("frame " + std::to_string(i) + " has dim " +
                              std::to_string(frames[i].dim()) + ", expected " + std::to_string(dim));
        if (frames[i].frame_index != i)
            throw IndexGap("frame at position " + std::to_string(i) + " carries index " +
                           std::to_string(frames[i].frame_index));
    }

    std::string bytes;
    bytes.reserve(16 + 4ull * dim * frames.size());
    bytes.append(kSequenceMagic, 8);
    put_u32_le(bytes, dim);
    put_u32_le(bytes, static_cast<std::uint32_t>(frames.size()));
    for (const auto& f : frames)
        for (float v : f.values) put_f32_le(bytes, v);
    write_file_bytes(path, bytes);
}

std::vector<BinaryMask> read_masks(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() < 20 || std::memcmp(bytes.data(), kMaskMagic, 8) != 0)
        throw BadMagic(path.string() + " is not a CUTGMSK1 mask file");

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t width = get_u32_le(p + 8);
    const std::uint32_t height = get_u32_le(p + 12);
    const std::uint32_t frame_count = get_u32_le(p + 16);

    const std::uint64_t bits_per_frame = static_cast<std::uint64_t>(width) * height;
    const std::uint64_t bytes_per_frame = (bits_per_frame + 7) / 8;
    const std::uint64_t expected = 20ull + bytes_per_frame * frame_count;
    if (bytes.size() != expected)
        throw TruncatedFile(path.string() + ": expected " + std::to_string(expected) +
                            " bytes, found " + std::to_string(bytes.size()));

    std::vector<BinaryMask> masks;
    masks.reserve(frame_count);
    const unsigned char* cursor = p + 20;
    for (std::uint32_t i = 0; i < frame_count; ++i, cursor += bytes_per_frame) {
        BinaryMask m = BinaryMask::zeros(width, height);
        for (std::uint64_t k = 0; k < bits_per_frame; ++k) {
            const unsigned char byte = cursor[k / 8];
            m.bits[k] = (byte >> (7 - (k % 8))) & 1u;
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

void write_masks(const std::filesystem::path& path, std::span<const BinaryMask> masks) {
    std::uint32_t width = 0, height = 0;
    if (!masks.empty()) {
        width = masks[0].width;
        height = masks[0].height;
    }
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const auto& m = masks[i];
        if (m.width == 0 || m.height == 0)
            throw DimMismatch("mask " + std::to_string(i) + " has zero width or height");
        if (m.width != width || m.height != height)
            throw DimMismatch("mask " + std::to_string(i) + " dimensions differ from mask 0");
        if (m.bits.size() != static_cast<std::size_t>(width) * height)
            throw DimMismatch("mask " + std::to_string(i) + " bit count does not match width*height");
    }

    const std::uint64_t bits_per_frame = static_cast<std::uint64_t>(width) * height;
    const std::uint64_t bytes_per_frame = (bits_per_frame + 7) / 8;

    std::string bytes;
    bytes.reserve(20 + bytes_per_frame * masks.size());
    bytes.append(kMaskMagic, 8);
    put_u32_le(bytes, width);
    put_u32_le(bytes, height);
    put_u32_le(bytes, static_cast<std::uint32_t>(masks.size()));
    for (const auto& m : masks) {
        std::string frame(bytes_per_frame, '\0');
        for (std::uint64_t k = 0; k < bits_per_frame; ++k)
            if (m.bits[k]) frame[k / 8] |= static_cast<char>(1u << (7 - (k % 8)));
        bytes.append(frame);
    }
    write_file_bytes(path, bytes);
}

std::vector<Region> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Region> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        labels.push_back(region_from_char(line[0]));
    }
    return labels;
}

void write_labels(const std::filesystem::path& path, std::span<const Region> labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (Region r : labels) out << region_char(r) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

} // namespace cutguard
