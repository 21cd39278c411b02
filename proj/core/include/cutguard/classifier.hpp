#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cutguard/expr.hpp"
#include "cutguard/features.hpp"
#include "cutguard/types.hpp"

namespace cutguard {

struct ConstantDef {
    std::string name;
    double value = 0.0;
    bool free = false; // calibration may rewrite this constant
};

// A leaf verdict; `label` is the fired_rule identifier reported in verdicts.
struct DecisionLeaf {
    bool is_interjection = false;
    std::string label;
};

// Either a leaf or an index into ClassifierConfig::nodes.
struct DecisionBranch {
    int node = -1;
    DecisionLeaf leaf;
    bool is_leaf() const noexcept { return node < 0; }
};

struct DecisionNode {
    ThresholdExpr guard; // must type-check to Boolean
    DecisionBranch on_true;
    DecisionBranch on_false;
};

// Declarative threshold/decision-tree classifier. Serialized as a
// line-oriented text format:
//
//   # comment
//   name cutie
//   warmup 2
//   window_short 1
//   window_long 5
//   policy exclude_flagged
//   const st0_gate 2.0 free
//   tree (if (<= lt1_ratio 1.07) clean:prefilter
//          (if (< mdr mdrt) clean:mdr_reject
//            (if (> st0 st0_gate) interjection:st0_fire clean:st0_reject)))
//
// Leaves are `interjection` or `clean`, optionally suffixed with `:label`.
// The tree expression may span lines; parentheses must balance.
struct ClassifierConfig {
    std::string name;
    std::uint32_t warmup_frames = 2; // verdict forced NonInterjection for frame_index < warmup
    std::vector<ConstantDef> constants;
    std::vector<DecisionNode> nodes; // nodes[0] is the root
    FeatureConfig features;

    const ConstantDef* find_constant(const std::string& cname) const;
};

struct Verdict {
    std::uint32_t frame_index = 0;
    bool is_interjection = false;
    std::string fired_rule;
};

struct TreeDecision {
    bool is_interjection = false;
    std::string fired_rule;
    double deciding_gap = 0.0; // |lhs - rhs| of the last comparison evaluated
};

// Throws ConfigInvalid on malformed configs (no nodes, type errors, dangling
// branch indices, cycles, unresolved constants).
void validate_config(const ClassifierConfig& config);

// Walks the tree on one frame's features. Throws InvalidFeature when a guard
// touches a not-yet-valid feature.
TreeDecision evaluate_tree(const ClassifierConfig& config, const FrameFeatures& features);

// Streaming classification with the run_length / window-history feedback loop
// closed frame by frame. One verdict per frame index >= 1; frame 0 is the
// annotated first frame and is never an interjection.
// Throws TooShort, ConfigInvalid.
std::vector<Verdict> classify_stream(std::span<const FrameEmbedding> frames,
                                     const ClassifierConfig& config);

struct ClassifyTrace {
    std::vector<Verdict> verdicts;
    std::vector<FrameFeatures> features;
};
ClassifyTrace classify_stream_trace(std::span<const FrameEmbedding> frames,
                                    const ClassifierConfig& config);

// Named presets: "cutie", "xmem", "sam2". Constants printed with the tree
// descriptions ship verbatim (1.07, 287, 170, 1, 0.97, the 0.15/170/1.03
// exponential); constants marked `free` are calibration placeholders.
// Throws UnknownPreset.
ClassifierConfig preset(const std::string& name);

// Source text of a preset, in the config file format.
const std::string& preset_text(const std::string& name);

ClassifierConfig parse_classifier_config(const std::string& text);
ClassifierConfig load_classifier_config(const std::filesystem::path& path);

// Round-trips through parse_classifier_config. Free constants keep their
// `free` marker; `calibrated` names get a provenance comment.
std::string format_classifier_config(const ClassifierConfig& config,
                                     std::span<const std::string> calibrated = {});
void save_classifier_config(const std::filesystem::path& path, const ClassifierConfig& config,
                            std::span<const std::string> calibrated = {});

// Rewrites a named constant in the table and in every guard referencing it.
// Throws ConfigInvalid if the name is unknown.
void rebind_constant(ClassifierConfig& config, const std::string& name, double value);

// Serialized verdict log: one `frame_index verdict fired_rule` line per frame.
void write_verdicts(const std::filesystem::path& path, std::span<const Verdict> verdicts);
std::vector<Verdict> read_verdicts(const std::filesystem::path& path);

} // namespace cutguard
