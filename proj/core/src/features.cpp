#include "cutguard/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "cutguard/errors.hpp"

namespace cutguard {

FirstOrder first_order(double current, double previous) {
    FirstOrder fo;
    fo.ratio = current / std::max(previous, kRatioEpsilon);
    fo.diff = current - previous;
    return fo;
}

MdrUpdate update_mdr(MdrState state, double current_distance) {
    MdrUpdate u;
    u.mdr = current_distance / std::max(state.max_distance_seen, kRatioEpsilon);
    u.state.max_distance_seen = std::max(state.max_distance_seen, current_distance);
    u.state.initialized_from = state.initialized_from + 1;
    return u;
}

double mdrt(std::uint32_t run_length) {
    return std::max(0.86 - 0.003 * static_cast<double>(run_length), 0.50);
}

FeatureStream::FeatureStream(FeatureConfig cfg) : cfg_(cfg) {
    if (cfg_.window_short == 0 || cfg_.window_long == 0)
        throw ConfigInvalid("window sizes must be positive");
    if (cfg_.variance_floor <= 0.0) throw ConfigInvalid("variance_floor must be positive");
}

void FeatureStream::prime(const FrameEmbedding& first) {
    if (primed_) throw std::logic_error("FeatureStream already primed");
    history_.push_back(first);
    primed_ = true;
}

FrameFeatures FeatureStream::step(const FrameEmbedding& frame) {
    if (!primed_) throw std::logic_error("FeatureStream::prime must run first");
    if (awaiting_feedback_) throw std::logic_error("feedback for previous frame is missing");

    FrameFeatures f;
    f.frame_index = next_index_;

    const DistanceConfig short_cfg{cfg_.window_short, cfg_.variance_floor};
    const DistanceConfig long_cfg{cfg_.window_long, cfg_.variance_floor};
    const std::span<const FrameEmbedding> hist(history_);
    f.st0 = regularized_distance(frame, window_stats(hist, cfg_.window_short), short_cfg);
    f.lt0 = regularized_distance(frame, window_stats(hist, cfg_.window_long), long_cfg);

    if (have_prev_) {
        const FirstOrder st = first_order(f.st0, prev_st0_);
        const FirstOrder lt = first_order(f.lt0, prev_lt0_);
        f.st1_ratio = st.ratio;
        f.st1_diff = st.diff;
        f.lt1_ratio = lt.ratio;
        f.lt1_diff = lt.diff;
        f.first_order_valid = true;
    }

    // MDR is reported against the maximum seen before this frame; whether this
    // frame's distance is absorbed into the maximum is settled in feedback().
    f.mdr = f.lt0 / std::max(mdr_long_.max_distance_seen, kRatioEpsilon);
    f.mdr_short = f.st0 / std::max(mdr_short_.max_distance_seen, kRatioEpsilon);
    f.mdr_valid = mdr_long_.initialized_from + 1 >= 2;

    f.run_length = run_length_;

    pending_st0_ = f.st0;
    pending_lt0_ = f.lt0;
    pending_frame_ = frame;
    awaiting_feedback_ = true;
    ++next_index_;
    return f;
}

void FeatureStream::feedback(bool is_interjection) {
    if (!awaiting_feedback_) throw std::logic_error("feedback without a pending step");
    awaiting_feedback_ = false;

    const bool absorb_max = !cfg_.freeze_max_during_interjection || !is_interjection;
    ++mdr_long_.initialized_from;
    ++mdr_short_.initialized_from;
    if (absorb_max) {
        mdr_long_.max_distance_seen = std::max(mdr_long_.max_distance_seen, pending_lt0_);
        mdr_short_.max_distance_seen = std::max(mdr_short_.max_distance_seen, pending_st0_);
    }

    const bool accept = cfg_.policy == WindowPolicy::IncludeAll || !is_interjection;
    if (accept) {
        history_.push_back(pending_frame_);
        const std::size_t keep = std::max(cfg_.window_long, cfg_.window_short);
        if (history_.size() > keep)
            history_.erase(history_.begin(), history_.end() - static_cast<std::ptrdiff_t>(keep));
        prev_st0_ = pending_st0_;
        prev_lt0_ = pending_lt0_;
        have_prev_ = true;
    }

    run_length_ = is_interjection ? run_length_ + 1 : 0;
}

std::vector<FrameFeatures> featurize_stream(std::span<const FrameEmbedding> frames,
                                            const FeatureConfig& cfg,
                                            const std::vector<bool>& feedback) {
    if (frames.size() < 2) throw TooShort("featurize_stream needs at least 2 frames");
    if (!feedback.empty() && feedback.size() != frames.size() - 1)
        throw LengthMismatch("feedback length " + std::to_string(feedback.size()) +
                             " vs " + std::to_string(frames.size() - 1) + " emitted frames");

    FeatureStream fs(cfg);
    fs.prime(frames[0]);
    std::vector<FrameFeatures> out;
    out.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        out.push_back(fs.step(frames[i]));
        fs.feedback(feedback.empty() ? false : feedback[i - 1]);
    }
    return out;
}

} // namespace cutguard
