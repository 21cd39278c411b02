#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cutguard/classifier.hpp"
#include "cutguard/types.hpp"

namespace cutguard {

// Cadence behavior when the frame a write would land on is flagged:
//   DeferCadence  - the write moves to the first clean frame once the period
//                   has elapsed (an interjection defers, not consumes, the
//                   slot; coverage resumes as soon as the suffix begins).
//   StrictCadence - the slot is consumed; the next write waits a full period.
enum class GateMode { DeferCadence, StrictCadence };

// Simulated working-memory buffer: frame indices only, since there is no real
// encoder state to hold. Oldest-first eviction when capacity is set.
struct MemoryBuffer {
    std::vector<std::uint32_t> entries;
    std::optional<std::size_t> capacity;
    std::uint32_t write_period = 5;
};

enum class EmittedMask { Predicted, ForcedEmpty };

struct GateRecord {
    std::uint32_t frame_index = 0;
    bool is_interjection = false;
    bool wrote_memory = false;
    EmittedMask emitted = EmittedMask::Predicted;
};

struct GateTrace {
    std::vector<GateRecord> records; // one per frame, frame 0 included
};

struct GateResult {
    MemoryBuffer buffer;
    GateTrace trace;
};

// Frame 0 is always written (it carries the input annotation). Thereafter a
// frame is written iff the period has elapsed since the last write and its
// verdict is NonInterjection. Verdicts must align with frames (one per frame
// index >= 1). Throws LengthMismatch.
GateResult run_gate(std::span<const FrameEmbedding> frames, std::span<const Verdict> verdicts,
                    std::uint32_t write_period = 5, GateMode mode = GateMode::DeferCadence,
                    std::optional<std::size_t> capacity = std::nullopt);

// ForcedEmpty frames get all-zero masks, everything else passes through.
// Throws LengthMismatch.
std::vector<BinaryMask> apply_gate_to_masks(std::span<const BinaryMask> predicted,
                                            const GateTrace& trace);

// Text log, one `frame_index verdict wrote emitted` line per frame, e.g.
//   12 interjection 0 empty
void write_gate_trace(const std::filesystem::path& path, const GateTrace& trace);
GateTrace read_gate_trace(const std::filesystem::path& path);

} // namespace cutguard
