#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cutguard/types.hpp"

namespace cutguard {

// Element-wise mean/variance over a trailing context window of embeddings.
// Variance is the population variance (divisor = effective_window).
struct WindowStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t effective_window = 0;
};

struct DistanceConfig {
    std::size_t window = 5;       // trailing context window w, in frames
    double variance_floor = 1e-6; // floor on sigma for nonzero variances
};

// Stats over the last min(w, history.size()) frames of `history`.
// Throws EmptyHistory, DimMismatch.
WindowStats window_stats(std::span<const FrameEmbedding> history, std::size_t w);

// Euclidean norm of (f_i - mean) / sigma', where per element
//   sigma' = max(sqrt(variance), variance_floor)  when variance > 0
//   sigma' = 1                                    when variance == 0
// A single-frame window therefore degenerates to the plain L2 distance.
// Throws DimMismatch.
double regularized_distance(const FrameEmbedding& current, const WindowStats& stats,
                            const DistanceConfig& cfg);

// One distance per frame index >= 1; the window for frame i is the
// min(w, i) frames preceding it, so the first w-1 frames run on
// intermediate windows of size 1..w-1. Output index k maps to frame k+1.
// Throws TooShort.
std::vector<double> stream_distances(std::span<const FrameEmbedding> frames,
                                     const DistanceConfig& cfg);

} // namespace cutguard
