#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cutguard/distance.hpp"
#include "cutguard/types.hpp"

namespace cutguard {

// Per-frame classifier features derived from the short- and long-window
// distance streams. First-order slots are flagged not-yet-valid on the first
// emitted frame (a ratio needs two distances of the same window kind), and
// MDR slots are flagged until two distances have been observed, so
// classifiers can refuse to fire instead of consuming sentinel values.
struct FrameFeatures {
    std::uint32_t frame_index = 0;

    double st0 = 0.0; // short-window (w=1) regularized distance
    double lt0 = 0.0; // long-window (w=5 default) regularized distance

    double st1_ratio = 1.0;
    double st1_diff = 0.0;
    double lt1_ratio = 1.0;
    double lt1_diff = 0.0;
    bool first_order_valid = false;

    double mdr = 0.0;       // lt0 over the running maximum lt0
    double mdr_short = 0.0; // st0 over the running maximum st0
    bool mdr_valid = false;

    std::uint32_t run_length = 0; // consecutive interjection verdicts ending at previous frame
};

// Running maximum of observed window distances.
struct MdrState {
    double max_distance_seen = 0.0;
    std::size_t initialized_from = 0; // count of distances observed
};

struct MdrUpdate {
    double mdr = 0.0;
    MdrState state;
};

inline constexpr double kRatioEpsilon = 1e-9;

// ratio = current / max(previous, eps); diff = current - previous.
struct FirstOrder {
    double ratio = 1.0;
    double diff = 0.0;
};
FirstOrder first_order(double current, double previous);

// mdr = current / max(max_seen, eps); the maximum absorbs every observed
// distance, including frames later classified as interjections.
MdrUpdate update_mdr(MdrState state, double current_distance);

// MDR threshold as a function of the current interjection run length l:
// max(0.86 - 0.003*l, 0.50). Constant 0.50 from l = 120 on.
double mdrt(std::uint32_t run_length);

// Controls which frames feed the trailing windows and the first-order
// comparison registers while a stream is being classified.
enum class WindowPolicy {
    // Frames flagged interjection are kept out of the window history and the
    // previous-distance registers; the stream keeps being compared against
    // the most recent frames believed to belong to the original video.
    ExcludeFlagged,
    // Every frame enters the history regardless of verdict.
    IncludeAll,
};

struct FeatureConfig {
    std::size_t window_short = 1;
    std::size_t window_long = 5;
    double variance_floor = 1e-6;
    WindowPolicy policy = WindowPolicy::ExcludeFlagged;
    // When set, distances of frames flagged interjection do not advance the
    // running MDR maxima. Off by default: the maximum updates on every frame.
    bool freeze_max_during_interjection = false;
};

// Sequential per-stream extractor. One frame is featurized per step() and the
// caller reports the classification for that frame through feedback() before
// the next step. Distinct streams need distinct extractors.
class FeatureStream {
public:
    // Throws ConfigInvalid on zero window sizes.
    explicit FeatureStream(FeatureConfig cfg = {});

    // Seeds the history with the annotated first frame (index 0).
    void prime(const FrameEmbedding& first);

    FrameFeatures step(const FrameEmbedding& frame);
    void feedback(bool is_interjection);

    const MdrState& mdr_state_long() const noexcept { return mdr_long_; }
    const MdrState& mdr_state_short() const noexcept { return mdr_short_; }
    std::uint32_t run_length() const noexcept { return run_length_; }

private:
    FeatureConfig cfg_;
    std::vector<FrameEmbedding> history_; // last window_long accepted frames
    bool primed_ = false;
    bool awaiting_feedback_ = false;

    double pending_st0_ = 0.0;
    double pending_lt0_ = 0.0;
    bool have_prev_ = false;
    double prev_st0_ = 0.0;
    double prev_lt0_ = 0.0;

    MdrState mdr_long_;
    MdrState mdr_short_;
    FrameEmbedding pending_frame_;

    std::uint32_t run_length_ = 0;
    std::uint32_t next_index_ = 1;
};

// Batch convenience over a whole stream. `feedback` carries the per-frame
// classification for emitted frames (index k maps to frame k+1); when empty,
// every frame counts as non-interjection. Output has one entry per frame
// index >= 1. Throws TooShort, LengthMismatch.
std::vector<FrameFeatures> featurize_stream(std::span<const FrameEmbedding> frames,
                                            const FeatureConfig& cfg = {},
                                            const std::vector<bool>& feedback = {});

} // namespace cutguard
