#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "cutguard/types.hpp"

namespace cutguard {

// Fixed binary formats, little-endian regardless of host:
//
//   embedding sequence ("CUTGEMB1"):
//     magic[8] | dim u32 | frame_count u32 | frame_count * dim * f32
//     total size = 16 + 4*dim*frame_count bytes
//
//   mask sequence ("CUTGMSK1"):
//     magic[8] | width u32 | height u32 | frame_count u32 | packed frames
//     each frame is width*height bits row-major, MSB first, padded to a
//     whole byte per frame
//
// Region labels travel as a sidecar text file, one of P/I/S/C per line.

inline constexpr char kSequenceMagic[8] = {'C', 'U', 'T', 'G', 'E', 'M', 'B', '1'};
inline constexpr char kMaskMagic[8] = {'C', 'U', 'T', 'G', 'M', 'S', 'K', '1'};

// Throws BadMagic, TruncatedFile, NonFiniteValue, IoError.
std::vector<FrameEmbedding> read_sequence(const std::filesystem::path& path);

// All frames must share one dim and carry frame_index 0..n-1.
// Throws DimMismatch, IndexGap, IoError.
void write_sequence(const std::filesystem::path& path, std::span<const FrameEmbedding> frames);

// Throws BadMagic, TruncatedFile, IoError.
std::vector<BinaryMask> read_masks(const std::filesystem::path& path);

// All masks must share nonzero width/height. Throws DimMismatch, IoError.
void write_masks(const std::filesystem::path& path, std::span<const BinaryMask> masks);

std::vector<Region> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, std::span<const Region> labels);

} // namespace cutguard
