#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cutguard/classifier.hpp"
#include "cutguard/dataset.hpp"

namespace cutguard {

struct CalibrationResult {
    ClassifierConfig config; // template with free constants filled in
    double train_accuracy = 0.0;
    std::size_t false_positive_count = 0;
    double recall = 0.0; // detected interjection frames / interjection frames
    double margin = 0.0; // smallest |feature - threshold| over clean frames
    std::vector<std::string> calibrated_names;
};

// Fits the template's free constants against a labeled corpus.
//
// Features are extracted with the ground-truth labels driving the feedback
// channel (run lengths and window history follow the true interjection
// placement, which is known during training). The search is a quantile grid
// over data-driven candidate thresholds followed by one coordinate-wise
// refinement pass, selecting lexicographically:
//   1. fewest clean-frame false positives,
//   2. most interjection frames detected,
//   3. largest margin.
// Deterministic given corpus order. Throws EmptyCorpus, NoFreeConstants.
CalibrationResult calibrate(std::span<const SplicedSequence> corpus,
                            const ClassifierConfig& template_config);

} // namespace cutguard
