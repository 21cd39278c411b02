#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cutguard/dataset.hpp"
#include "cutguard/types.hpp"

namespace cutguard {

// |pred AND truth| / |pred OR truth|; 1 when both masks are empty.
// Throws DimMismatch.
double jaccard(const BinaryMask& pred, const BinaryMask& truth);

// Contour F-measure: 4-connected boundary pixels matched within a Chebyshev
// pixel tolerance, harmonic mean of precision and recall. 1 when both
// boundaries are empty, 0 when exactly one is. Throws DimMismatch.
double boundary_f(const BinaryMask& pred, const BinaryMask& truth, std::uint32_t tolerance = 1);

// Plain pixelwise F1 over mask pixels; alternative contour measure.
double pixel_f1(const BinaryMask& pred, const BinaryMask& truth);

// 100 * predicted-positive pixels / total pixels over the given frames.
// Throws EmptyRegion when the span is empty.
double false_positive_pct(std::span<const BinaryMask> predictions);

struct EvalOptions {
    std::uint32_t boundary_tolerance = 1;
    bool pixelwise_f1 = false; // use pixel_f1 in place of the contour measure
};

// Region-wise metrics on a 0-100 scale. Regions absent from the sample
// (clean samples have no interjection/prefix/suffix) yield nullopt.
struct RegionReport {
    double full_jf = 0.0;
    std::optional<double> interjection_fp_pct;
    std::optional<double> suffix_jf;
    std::optional<double> prefix_jf;
    std::vector<double> per_frame_scores; // per-sample breakdown, 0-1 scale
};

// Per-frame scoring: non-interjection frames get (jaccard + F) / 2 against
// ground truth; interjection frames (ground truth all-negative) score 1 when
// the prediction is empty and 0 otherwise. full_jf averages over all frames.
// Throws LengthMismatch.
RegionReport evaluate_sample(const SplicedSequence& sample, std::span<const BinaryMask> predictions,
                             const EvalOptions& options = {});

// One aggregated table row: mean metrics over n_samples of one config at one
// interjection length.
struct ReportRow {
    std::string config;
    std::uint32_t length = 0;
    double full_jf = 0.0;
    std::optional<double> fp_pct;
    std::optional<double> suffix_jf;
    std::optional<double> prefix_jf;
    std::size_t n_samples = 0;
};

// Mean of per-sample reports; optional metrics aggregate over the samples
// that carry them.
ReportRow aggregate_reports(const std::string& config, std::uint32_t length,
                            std::span<const RegionReport> reports);

// Three aligned text tables (full video J&F, interjection false-positive %,
// suffix J&F); columns ordered by interjection length ascending, clean (0)
// first. Absent cells print "-".
std::string format_tables(std::span<const ReportRow> rows);

// Machine-readable variant:
//   config,length,full_jf,fp_pct,suffix_jf,prefix_jf,n_samples
std::string format_csv(std::span<const ReportRow> rows);

} // namespace cutguard
