#include "cutguard/distance.hpp"

#include <algorithm>
#include <cmath>

#include "cutguard/errors.hpp"

namespace cutguard {

WindowStats window_stats(std::span<const FrameEmbedding> history, std::size_t w) {
    if (history.empty()) throw EmptyHistory("window_stats needs at least one frame");
    if (w == 0) throw EmptyHistory("window size must be positive");

    const std::size_t w_eff = std::min(w, history.size());
    const std::span<const FrameEmbedding> window = history.subspan(history.size() - w_eff);
    const std::size_t dim = window[0].dim();
    for (const auto& f : window)
        if (f.dim() != dim) throw DimMismatch("window frames disagree on dim");

    WindowStats stats;
    stats.effective_window = w_eff;
    stats.mean.assign(dim, 0.0);
    stats.variance.assign(dim, 0.0);

    for (const auto& f : window)
        for (std::size_t d = 0; d < dim; ++d) stats.mean[d] += f.values[d];
    for (std::size_t d = 0; d < dim; ++d) stats.mean[d] /= static_cast<double>(w_eff);

    for (const auto& f : window)
        for (std::size_t d = 0; d < dim; ++d) {
            const double dev = f.values[d] - stats.mean[d];
            stats.variance[d] += dev * dev;
        }
    for (std::size_t d = 0; d < dim; ++d) {
        stats.variance[d] /= static_cast<double>(w_eff);
        if (stats.variance[d] < 0.0) stats.variance[d] = 0.0;
    }
    return stats;
}

double regularized_distance(const FrameEmbedding& current, const WindowStats& stats,
                            const DistanceConfig& cfg) {
    const std::size_t dim = current.dim();
    if (stats.mean.size() != dim || stats.variance.size() != dim)
        throw DimMismatch("embedding dim " + std::to_string(dim) + " vs window stats dim " +
                          std::to_string(stats.mean.size()));

    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double var = stats.variance[d];
        const double sigma = var > 0.0 ? std::max(std::sqrt(var), cfg.variance_floor) : 1.0;
        const double z = (static_cast<double>(current.values[d]) - stats.mean[d]) / sigma;
        acc += z * z;
    }
    return std::sqrt(acc);
}

std::vector<double> stream_distances(std::span<const FrameEmbedding> frames,
                                     const DistanceConfig& cfg) {
    if (frames.size() < 2) throw TooShort("stream_distances needs at least 2 frames");

    std::vector<double> out;
    out.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const WindowStats stats = window_stats(frames.first(i), cfg.window);
        out.push_back(regularized_distance(frames[i], stats, cfg));
    }
    return out;
}

} // namespace cutguard
