#include "cutguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "cutguard/errors.hpp"

namespace cutguard {
namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimMismatch("mask dimensions differ: " + std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height));
}

// 4-connected boundary: a set pixel with a 4-neighbor outside the mask, or on
// the image edge.
std::vector<std::uint8_t> boundary_of(const BinaryMask& m) {
    std::vector<std::uint8_t> boundary(m.bits.size(), 0);
    const auto w = static_cast<std::int64_t>(m.width);
    const auto h = static_cast<std::int64_t>(m.height);
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            if (!m.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y))) continue;
            const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            const bool open = edge ||
                              !m.at(static_cast<std::uint32_t>(x - 1), static_cast<std::uint32_t>(y)) ||
                              !m.at(static_cast<std::uint32_t>(x + 1), static_cast<std::uint32_t>(y)) ||
                              !m.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y - 1)) ||
                              !m.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y + 1));
            if (open) boundary[static_cast<std::size_t>(y) * m.width + static_cast<std::size_t>(x)] = 1;
        }
    return boundary;
}

// Marks every pixel within Chebyshev distance <= tolerance of a set pixel.
std::vector<std::uint8_t> dilate_chebyshev(const std::vector<std::uint8_t>& grid,
                                           std::uint32_t width, std::uint32_t height,
                                           std::uint32_t tolerance) {
    if (tolerance == 0) return grid;
    std::vector<std::uint8_t> out(grid.size(), 0);
    const auto w = static_cast<std::int64_t>(width);
    const auto h = static_cast<std::int64_t>(height);
    const auto t = static_cast<std::int64_t>(tolerance);
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            if (!grid[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)]) continue;
            for (std::int64_t dy = -t; dy <= t; ++dy)
                for (std::int64_t dx = -t; dx <= t; ++dx) {
                    const std::int64_t nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    out[static_cast<std::size_t>(ny) * width + static_cast<std::size_t>(nx)] = 1;
                }
        }
    return out;
}

double mean_of(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

std::string format_cell(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << *v;
    return out.str();
}

void format_one_table(std::ostringstream& out, const std::string& title,
                      const std::vector<std::string>& configs,
                      const std::vector<std::uint32_t>& lengths,
                      const std::map<std::pair<std::string, std::uint32_t>,
                                     std::optional<double>>& cells) {
    out << title << '\n';
    std::vector<std::size_t> widths;
    std::size_t config_width = std::string("config").size();
    for (const auto& c : configs) config_width = std::max(config_width, c.size());

    std::vector<std::string> headers;
    for (std::uint32_t len : lengths) {
        std::string h = std::to_string(len) + "-frames";
        if (len == 0) h += " (clean)";
        headers.push_back(h);
        widths.push_back(h.size());
    }

    out << std::left << std::setw(static_cast<int>(config_width + 2)) << "config";
    for (std::size_t i = 0; i < headers.size(); ++i)
        out << std::right << std::setw(static_cast<int>(widths[i] + 2)) << headers[i];
    out << '\n';

    for (const auto& config : configs) {
        out << std::left << std::setw(static_cast<int>(config_width + 2)) << config;
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            const auto it = cells.find({config, lengths[i]});
            const std::string cell = it == cells.end() ? "-" : format_cell(it->second);
            out << std::right << std::setw(static_cast<int>(widths[i] + 2)) << cell;
        }
        out << '\n';
    }
    out << '\n';
}

} // namespace

double jaccard(const BinaryMask& pred, const BinaryMask& truth) {
    require_same_dims(pred, truth);
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        const bool p = pred.bits[i] != 0;
        const bool t = truth.bits[i] != 0;
        inter += (p && t);
        uni += (p || t);
    }
    if (uni == 0) return 1.0; // both empty
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double boundary_f(const BinaryMask& pred, const BinaryMask& truth, std::uint32_t tolerance) {
    require_same_dims(pred, truth);
    const std::vector<std::uint8_t> bp = boundary_of(pred);
    const std::vector<std::uint8_t> bt = boundary_of(truth);

    std::size_t np = 0, nt = 0;
    for (auto v : bp) np += v;
    for (auto v : bt) nt += v;
    if (np == 0 && nt == 0) return 1.0;
    if (np == 0 || nt == 0) return 0.0;

    const std::vector<std::uint8_t> near_truth = dilate_chebyshev(bt, pred.width, pred.height, tolerance);
    const std::vector<std::uint8_t> near_pred = dilate_chebyshev(bp, pred.width, pred.height, tolerance);

    std::size_t matched_p = 0, matched_t = 0;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        if (bp[i] && near_truth[i]) ++matched_p;
        if (bt[i] && near_pred[i]) ++matched_t;
    }
    const double precision = static_cast<double>(matched_p) / static_cast<double>(np);
    const double recall = static_cast<double>(matched_t) / static_cast<double>(nt);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double pixel_f1(const BinaryMask& pred, const BinaryMask& truth) {
    require_same_dims(pred, truth);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        const bool p = pred.bits[i] != 0;
        const bool t = truth.bits[i] != 0;
        tp += (p && t);
        fp += (p && !t);
        fn += (!p && t);
    }
    if (tp == 0 && fp == 0 && fn == 0) return 1.0; // both empty
    if (2 * tp + fp + fn == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double false_positive_pct(std::span<const BinaryMask> predictions) {
    if (predictions.empty()) throw EmptyRegion("false_positive_pct over an empty region");
    std::size_t positive = 0, total = 0;
    for (const auto& m : predictions) {
        positive += m.positive_count();
        total += m.pixel_count();
    }
    if (total == 0) throw EmptyRegion("false_positive_pct over zero pixels");
    return 100.0 * static_cast<double>(positive) / static_cast<double>(total);
}

RegionReport evaluate_sample(const SplicedSequence& sample, std::span<const BinaryMask> predictions,
                             const EvalOptions& options) {
    const std::size_t n = sample.embeddings.size();
    if (sample.masks.size() != n || sample.labels.size() != n)
        throw LengthMismatch("sample masks/labels do not align with its frames");
    if (predictions.size() != n)
        throw LengthMismatch("prediction count " + std::to_string(predictions.size()) +
                             " vs sample frame count " + std::to_string(n));

    RegionReport report;
    report.per_frame_scores.reserve(n);
    std::vector<double> prefix_scores, suffix_scores;
    std::vector<BinaryMask> interjection_preds;

    for (std::size_t i = 0; i < n; ++i) {
        double score = 0.0;
        if (sample.labels[i] == Region::Interjection) {
            score = predictions[i].empty_mask() ? 1.0 : 0.0;
            interjection_preds.push_back(predictions[i]);
        } else {
            const double j = jaccard(predictions[i], sample.masks[i]);
            const double f = options.pixelwise_f1
                                 ? pixel_f1(predictions[i], sample.masks[i])
                                 : boundary_f(predictions[i], sample.masks[i],
                                              options.boundary_tolerance);
            score = 0.5 * (j + f);
            if (sample.labels[i] == Region::Prefix) prefix_scores.push_back(score);
            if (sample.labels[i] == Region::Suffix) suffix_scores.push_back(score);
        }
        report.per_frame_scores.push_back(score);
    }

    report.full_jf = 100.0 * mean_of(report.per_frame_scores);
    if (!interjection_preds.empty())
        report.interjection_fp_pct = false_positive_pct(interjection_preds);
    if (!suffix_scores.empty()) report.suffix_jf = 100.0 * mean_of(suffix_scores);
    if (!prefix_scores.empty()) report.prefix_jf = 100.0 * mean_of(prefix_scores);
    return report;
}

ReportRow aggregate_reports(const std::string& config, std::uint32_t length,
                            std::span<const RegionReport> reports) {
    ReportRow row;
    row.config = config;
    row.length = length;
    row.n_samples = reports.size();

    double full = 0.0;
    std::vector<double> fp, suffix, prefix;
    for (const auto& r : reports) {
        full += r.full_jf;
        if (r.interjection_fp_pct) fp.push_back(*r.interjection_fp_pct);
        if (r.suffix_jf) suffix.push_back(*r.suffix_jf);
        if (r.prefix_jf) prefix.push_back(*r.prefix_jf);
    }
    row.full_jf = reports.empty() ? 0.0 : full / static_cast<double>(reports.size());
    if (!fp.empty()) row.fp_pct = mean_of(fp);
    if (!suffix.empty()) row.suffix_jf = mean_of(suffix);
    if (!prefix.empty()) row.prefix_jf = mean_of(prefix);
    return row;
}

std::string format_tables(std::span<const ReportRow> rows) {
    std::vector<std::string> configs;
    std::set<std::uint32_t> length_set;
    for (const auto& r : rows) {
        if (std::find(configs.begin(), configs.end(), r.config) == configs.end())
            configs.push_back(r.config);
        length_set.insert(r.length);
    }
    const std::vector<std::uint32_t> lengths(length_set.begin(), length_set.end());

    std::map<std::pair<std::string, std::uint32_t>, std::optional<double>> full, fp, suffix;
    for (const auto& r : rows) {
        full[{r.config, r.length}] = r.full_jf;
        fp[{r.config, r.length}] = r.fp_pct;
        suffix[{r.config, r.length}] = r.suffix_jf;
    }

    std::ostringstream out;
    format_one_table(out, "Full Video Performance (J&F)", configs, lengths, full);
    format_one_table(out, "Interjection Performance (False Positive %)", configs, lengths, fp);
    format_one_table(out, "Suffix Performance (J&F)", configs, lengths, suffix);
    return out.str();
}

std::string format_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    out << "config,length,full_jf,fp_pct,suffix_jf,prefix_jf,n_samples\n";
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.config << ',' << r.length << ',' << r.full_jf << ',';
        if (r.fp_pct) out << *r.fp_pct;
        out << ',';
        if (r.suffix_jf) out << *r.suffix_jf;
        out << ',';
        if (r.prefix_jf) out << *r.prefix_jf;
        out << ',' << r.n_samples << '\n';
    }
    return out.str();
}

} // namespace cutguard
