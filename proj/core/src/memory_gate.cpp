#include "cutguard/memory_gate.hpp"

#include <fstream>
#include <sstream>

#include "cutguard/errors.hpp"

namespace cutguard {

GateResult run_gate(std::span<const FrameEmbedding> frames, std::span<const Verdict> verdicts,
                    std::uint32_t write_period, GateMode mode,
                    std::optional<std::size_t> capacity) {
    if (frames.empty()) throw LengthMismatch("run_gate needs at least one frame");
    if (verdicts.size() != frames.size() - 1)
        throw LengthMismatch("expected " + std::to_string(frames.size() - 1) + " verdicts, got " +
                             std::to_string(verdicts.size()));
    if (write_period == 0) throw LengthMismatch("write_period must be positive");

    GateResult result;
    result.buffer.capacity = capacity;
    result.buffer.write_period = write_period;

    auto append_entry = [&](std::uint32_t frame_index) {
        result.buffer.entries.push_back(frame_index);
        if (capacity && result.buffer.entries.size() > *capacity)
            result.buffer.entries.erase(result.buffer.entries.begin());
    };

    append_entry(0);
    result.trace.records.push_back({0, false, true, EmittedMask::Predicted});

    std::uint32_t last_slot = 0; // last write in defer mode, last consumed slot in strict mode
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const Verdict& v = verdicts[i - 1];
        if (v.frame_index != i)
            throw LengthMismatch("verdict at position " + std::to_string(i - 1) +
                                 " carries frame index " + std::to_string(v.frame_index));

        GateRecord rec;
        rec.frame_index = static_cast<std::uint32_t>(i);
        rec.is_interjection = v.is_interjection;
        rec.emitted = v.is_interjection ? EmittedMask::ForcedEmpty : EmittedMask::Predicted;

        const bool due = static_cast<std::uint32_t>(i) - last_slot >= write_period;
        if (due && !v.is_interjection) {
            rec.wrote_memory = true;
            append_entry(rec.frame_index);
            last_slot = rec.frame_index;
        } else if (due && mode == GateMode::StrictCadence) {
            // Slot consumed without a write.
            last_slot = rec.frame_index;
        }
        result.trace.records.push_back(rec);
    }
    return result;
}

std::vector<BinaryMask> apply_gate_to_masks(std::span<const BinaryMask> predicted,
                                            const GateTrace& trace) {
    if (predicted.size() != trace.records.size())
        throw LengthMismatch("mask count " + std::to_string(predicted.size()) +
                             " vs trace length " + std::to_string(trace.records.size()));

    std::vector<BinaryMask> out;
    out.reserve(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (trace.records[i].emitted == EmittedMask::ForcedEmpty)
            out.push_back(BinaryMask::zeros(predicted[i].width, predicted[i].height));
        else
            out.push_back(predicted[i]);
    }
    return out;
}

void write_gate_trace(const std::filesystem::path& path, const GateTrace& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& r : trace.records)
        out << r.frame_index << ' ' << (r.is_interjection ? "interjection" : "clean") << ' '
            << (r.wrote_memory ? 1 : 0) << ' '
            << (r.emitted == EmittedMask::ForcedEmpty ? "empty" : "predicted") << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

GateTrace read_gate_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    GateTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        GateRecord r;
        std::string verdict, emitted;
        int wrote = 0;
        if (!(ls >> r.frame_index >> verdict >> wrote >> emitted)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigInvalid("malformed gate trace line: " + line);
        }
        r.is_interjection = verdict == "interjection";
        r.wrote_memory = wrote != 0;
        r.emitted = emitted == "empty" ? EmittedMask::ForcedEmpty : EmittedMask::Predicted;
        trace.records.push_back(r);
    }
    return trace;
}

} // namespace cutguard
