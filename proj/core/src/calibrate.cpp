#include "cutguard/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cutguard/errors.hpp"
#include "cutguard/parallel.hpp"

namespace cutguard {
namespace {

constexpr std::size_t kGridPoints = 13;
constexpr std::size_t kRefinePoints = 257;

struct FrameCase {
    FrameFeatures features;
    bool truth_interjection = false;
    bool warmup = false;
};

struct Score {
    std::size_t false_positives = 0;
    std::size_t true_positives = 0;
    double margin = std::numeric_limits<double>::infinity();

    // Lexicographic: no clean false positives first, then recall, then margin.
    bool better_than(const Score& other) const {
        if (false_positives != other.false_positives)
            return false_positives < other.false_positives;
        if (true_positives != other.true_positives)
            return true_positives > other.true_positives;
        return margin > other.margin;
    }
};

std::vector<FrameCase> extract_cases(std::span<const SplicedSequence> corpus,
                                     const ClassifierConfig& config) {
    std::vector<FrameCase> cases;
    for (const auto& sample : corpus) {
        if (sample.embeddings.size() < 2)
            throw TooShort("corpus sample with fewer than 2 frames");
        if (sample.labels.size() != sample.embeddings.size())
            throw LengthMismatch("sample labels do not align with frames");

        FeatureStream fs(config.features);
        fs.prime(sample.embeddings[0]);
        for (std::size_t i = 1; i < sample.embeddings.size(); ++i) {
            FrameCase fc;
            fc.features = fs.step(sample.embeddings[i]);
            fc.truth_interjection = sample.labels[i] == Region::Interjection;
            fc.warmup = i < config.warmup_frames;
            fs.feedback(fc.truth_interjection); // training: true placement is known
            cases.push_back(std::move(fc));
        }
    }
    return cases;
}

// One comparison side facing a free constant, pre-evaluated per frame (the
// counterpart expressions never reference the candidate values, so they can
// be computed once). Margins measure clean frames against the calibrated
// thresholds through these values.
struct CounterpartColumn {
    std::size_t free_index = 0;
    std::vector<double> values; // NaN where the feature is not valid
};

Score score_config(const ClassifierConfig& config, std::span<const FrameCase> cases,
                   std::span<const CounterpartColumn> counterparts,
                   std::span<const double> free_values, std::size_t* correct_out = nullptr) {
    Score s;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const FrameCase& fc = cases[i];
        bool verdict = false;
        if (!fc.warmup) verdict = evaluate_tree(config, fc.features).is_interjection;
        if (fc.truth_interjection) {
            if (verdict) ++s.true_positives;
        } else {
            if (verdict) ++s.false_positives;
            if (!fc.warmup)
                for (const auto& column : counterparts) {
                    const double v = column.values[i];
                    if (!std::isnan(v))
                        s.margin = std::min(s.margin, std::abs(v - free_values[column.free_index]));
                }
        }
        if (verdict == fc.truth_interjection) ++correct;
    }
    if (correct_out) *correct_out = correct;
    return s;
}

// Comparison counterparts of a bare named constant, e.g. `st0` in
// (> st0 st0_gate). Observed counterpart values drive the candidate grid.
void collect_counterparts(const ThresholdExpr& e, const std::string& name,
                          std::vector<const ThresholdExpr*>& out) {
    using Op = ThresholdExpr::Op;
    const bool cmp = e.op == Op::Gt || e.op == Op::Lt || e.op == Op::Ge || e.op == Op::Le;
    if (cmp) {
        const auto is_named = [&](const ThresholdExpr& c) {
            return c.op == Op::Const && c.const_name == name;
        };
        if (is_named(e.children[0])) out.push_back(&e.children[1]);
        if (is_named(e.children[1])) out.push_back(&e.children[0]);
    }
    for (const auto& c : e.children) collect_counterparts(c, name, out);
}

std::vector<double> observed_values(const ClassifierConfig& config, const std::string& name,
                                    std::span<const FrameCase> cases) {
    std::vector<const ThresholdExpr*> counterparts;
    for (const auto& node : config.nodes) collect_counterparts(node.guard, name, counterparts);

    std::vector<double> values;
    for (const ThresholdExpr* expr : counterparts)
        for (const auto& fc : cases) {
            if (fc.warmup) continue;
            try {
                const ExprValue v = eval_expr(*expr, fc.features);
                if (std::holds_alternative<double>(v) && std::isfinite(std::get<double>(v)))
                    values.push_back(std::get<double>(v));
            } catch (const InvalidFeature&) {
                // feature not valid at this frame; nothing to observe
            }
        }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::vector<double> candidate_thresholds(const std::vector<double>& observed,
                                         double fallback_center, std::size_t budget) {
    std::vector<double> candidates;
    if (observed.size() < 2) {
        // No spread to exploit; try a geometric fan around the template value.
        const double base = fallback_center != 0.0 ? fallback_center : 1.0;
        for (double m : {0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
            candidates.push_back(base * m);
        if (!observed.empty()) {
            candidates.push_back(observed.front() - 1.0);
            candidates.push_back(observed.front() + 1.0);
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        return candidates;
    }

    std::vector<double> midpoints;
    midpoints.reserve(observed.size() - 1);
    std::size_t widest = 0;
    for (std::size_t i = 0; i + 1 < observed.size(); ++i) {
        midpoints.push_back(0.5 * (observed[i] + observed[i + 1]));
        if (observed[i + 1] - observed[i] > observed[widest + 1] - observed[widest]) widest = i;
    }

    candidates.push_back(observed.front() - 1.0);
    candidates.push_back(observed.back() + 1.0);
    candidates.push_back(midpoints[widest]); // separating gap, when one exists
    const std::size_t take = std::min(budget, midpoints.size());
    for (std::size_t k = 0; k < take; ++k) {
        const std::size_t idx = take == 1 ? 0 : k * (midpoints.size() - 1) / (take - 1);
        candidates.push_back(midpoints[idx]);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return candidates;
}

} // namespace

CalibrationResult calibrate(std::span<const SplicedSequence> corpus,
                            const ClassifierConfig& template_config) {
    if (corpus.empty()) throw EmptyCorpus("calibration corpus is empty");
    validate_config(template_config);

    std::vector<std::string> free_names;
    for (const auto& def : template_config.constants)
        if (def.free) free_names.push_back(def.name);
    if (free_names.empty())
        throw NoFreeConstants("template '" + template_config.name + "' has no free constants");

    const std::vector<FrameCase> cases = extract_cases(corpus, template_config);

    std::vector<std::vector<double>> observed_per_name, grids, refine_grids;
    std::vector<double> fallbacks;
    std::vector<CounterpartColumn> counterpart_columns;
    for (std::size_t i = 0; i < free_names.size(); ++i) {
        const std::string& name = free_names[i];
        observed_per_name.push_back(observed_values(template_config, name, cases));
        fallbacks.push_back(template_config.find_constant(name)->value);
        grids.push_back(candidate_thresholds(observed_per_name[i], fallbacks[i], kGridPoints));
        refine_grids.push_back(
            candidate_thresholds(observed_per_name[i], fallbacks[i], kRefinePoints));

        std::vector<const ThresholdExpr*> counterparts;
        for (const auto& node : template_config.nodes)
            collect_counterparts(node.guard, name, counterparts);
        for (const ThresholdExpr* expr : counterparts) {
            CounterpartColumn column;
            column.free_index = i;
            column.values.reserve(cases.size());
            for (const auto& fc : cases) {
                double v = std::numeric_limits<double>::quiet_NaN();
                if (!fc.warmup) {
                    try {
                        const ExprValue ev = eval_expr(*expr, fc.features);
                        if (std::holds_alternative<double>(ev)) v = std::get<double>(ev);
                    } catch (const InvalidFeature&) {
                    }
                }
                column.values.push_back(v);
            }
            counterpart_columns.push_back(std::move(column));
        }
    }

    // Keep the cartesian product tractable for templates with many free
    // constants; the refinement pass recovers per-coordinate precision.
    constexpr std::size_t kMaxCombos = 100000;
    std::size_t combos = 1;
    for (const auto& g : grids) combos *= g.size();
    for (std::size_t budget = kGridPoints; combos > kMaxCombos && budget > 2; --budget) {
        combos = 1;
        for (std::size_t i = 0; i < free_names.size(); ++i) {
            grids[i] = candidate_thresholds(observed_per_name[i], fallbacks[i], budget);
            combos *= grids[i].size();
        }
    }

    auto instantiate = [&](const std::vector<double>& values) {
        ClassifierConfig cfg = template_config;
        for (std::size_t i = 0; i < free_names.size(); ++i)
            rebind_constant(cfg, free_names[i], values[i]);
        return cfg;
    };
    auto combo_values = [&](std::size_t combo) {
        std::vector<double> values(free_names.size());
        for (std::size_t i = 0; i < free_names.size(); ++i) {
            values[i] = grids[i][combo % grids[i].size()];
            combo /= grids[i].size();
        }
        return values;
    };

    std::vector<Score> scores(combos);
    parallel_for(combos, [&](std::size_t c) {
        const std::vector<double> values = combo_values(c);
        scores[c] = score_config(instantiate(values), cases, counterpart_columns, values);
    });

    std::size_t best_combo = 0;
    for (std::size_t c = 1; c < combos; ++c)
        if (scores[c].better_than(scores[best_combo])) best_combo = c;

    // One coordinate-wise refinement pass over the denser candidate lists.
    std::vector<double> best_values = combo_values(best_combo);
    Score best_score = scores[best_combo];
    for (std::size_t i = 0; i < free_names.size(); ++i) {
        const std::vector<double>& cands = refine_grids[i];
        std::vector<Score> cand_scores(cands.size());
        parallel_for(cands.size(), [&](std::size_t k) {
            std::vector<double> values = best_values;
            values[i] = cands[k];
            cand_scores[k] = score_config(instantiate(values), cases, counterpart_columns, values);
        });
        for (std::size_t k = 0; k < cands.size(); ++k)
            if (cand_scores[k].better_than(best_score)) {
                best_score = cand_scores[k];
                best_values[i] = cands[k];
            }
    }

    CalibrationResult result;
    result.config = instantiate(best_values);
    result.calibrated_names = free_names;

    std::size_t correct = 0;
    const Score final_score =
        score_config(result.config, cases, counterpart_columns, best_values, &correct);
    result.false_positive_count = final_score.false_positives;
    result.margin = std::isfinite(final_score.margin) ? final_score.margin : 0.0;
    result.train_accuracy =
        cases.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(cases.size());

    std::size_t interjections = 0;
    for (const auto& fc : cases) interjections += fc.truth_interjection;
    result.recall = interjections == 0
                        ? 1.0
                        : static_cast<double>(final_score.true_positives) /
                              static_cast<double>(interjections);
    return result;
}

} // namespace cutguard
