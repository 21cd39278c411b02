#include "cutguard/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "cutguard/errors.hpp"
#include "cutguard/parallel.hpp"
#include "cutguard/sequence_io.hpp"

namespace cutguard {
namespace {

std::vector<FrameEmbedding> load_embeddings(const std::filesystem::path& input) {
    if (std::filesystem::is_directory(input)) return read_sequence(input / "emb.bin");
    return read_sequence(input);
}

ClassifierConfig resolve_config(const std::optional<std::string>& preset_name,
                                const std::optional<std::filesystem::path>& config_path) {
    if (preset_name && config_path)
        throw ConfigInvalid("pass either a preset or a config file, not both");
    if (config_path) return load_classifier_config(*config_path);
    if (preset_name) return preset(*preset_name);
    throw ConfigInvalid("no classifier given: pass --preset or --config");
}

std::vector<BinaryMask> predictions_for(const CorpusSample& sample) {
    if (!sample.predictions.empty()) return sample.predictions;
    return simulated_predictions(sample.sequence);
}

} // namespace

std::string sample_id(std::uint32_t length, std::size_t k) {
    std::ostringstream id;
    id << "len" << std::setw(4) << std::setfill('0') << length << "_s" << std::setw(2)
       << std::setfill('0') << k;
    return id.str();
}

SynthSpec synth_recipe(const SynthCmdOptions& options, std::uint32_t length, std::size_t k) {
    SynthSpec spec;
    spec.dim = options.dim;
    spec.prefix_len = options.prefix;
    spec.suffix_len = options.suffix;
    spec.interjection_len = length;
    spec.within_video_step = options.step;
    spec.cross_video_gap = options.gap;
    spec.seed = mix_seed(options.seed, (static_cast<std::uint64_t>(length) << 20) + k);
    spec.mask_width = options.mask_width;
    spec.mask_height = options.mask_height;
    if (options.spikes && k % 2 == 1) {
        PanSpike spike;
        spike.magnitude = options.spike_magnitude;
        // Alternate the hazard between prefix and suffix middles.
        spike.frame_index = (k % 4 == 1) ? options.prefix / 2
                                         : options.prefix + length + options.suffix / 2;
        spec.pan_spike = spike;
    }
    return spec;
}

std::size_t run_synth(const SynthCmdOptions& options) {
    if (options.samples == 0) throw InvalidSpec("need at least one sample per length");
    if (options.lengths.empty()) throw InvalidSpec("need at least one interjection length");

    std::filesystem::create_directories(options.out);
    struct Job {
        std::uint32_t length;
        std::size_t k;
    };
    std::vector<Job> jobs;
    for (std::uint32_t length : options.lengths)
        for (std::size_t k = 0; k < options.samples; ++k) jobs.push_back({length, k});

    parallel_for(jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        const SynthSpec spec = synth_recipe(options, job.length, job.k);
        CorpusSample sample;
        sample.sequence = synth_sample(spec);
        sample.predictions = simulated_predictions(sample.sequence);
        sample.manifest.id = sample_id(job.length, job.k);
        sample.manifest.dim = spec.dim;
        sample.manifest.prefix_len = spec.prefix_len;
        sample.manifest.interjection_len = spec.interjection_len;
        sample.manifest.suffix_len = spec.suffix_len;
        sample.manifest.frame_count = static_cast<std::uint32_t>(sample.sequence.embeddings.size());
        sample.manifest.seed = spec.seed;
        sample.manifest.within_video_step = spec.within_video_step;
        sample.manifest.cross_video_gap = spec.cross_video_gap;
        sample.manifest.pan_spike = spec.pan_spike;
        write_sample_dir(options.out / sample.manifest.id, sample);
    });
    return jobs.size();
}

void run_splice(const SpliceCmdOptions& options) {
    SourceSequence a;
    a.embeddings = read_sequence(options.source_a);
    if (options.masks_a) a.masks = read_masks(*options.masks_a);
    SourceSequence b;
    b.embeddings = read_sequence(options.source_b);

    SpliceSpec spec;
    spec.prefix_len = options.prefix;
    spec.suffix_len = options.suffix;
    spec.interjection_len = options.length;
    spec.seed = options.seed;

    CorpusSample sample;
    sample.sequence = splice(spec, a, b);
    if (!sample.sequence.masks.empty())
        sample.predictions = simulated_predictions(sample.sequence);
    sample.manifest.id = options.out.filename().string();
    sample.manifest.dim = static_cast<std::uint32_t>(sample.sequence.embeddings.empty()
                                                         ? 0
                                                         : sample.sequence.embeddings[0].dim());
    sample.manifest.prefix_len = spec.prefix_len;
    sample.manifest.interjection_len = spec.interjection_len;
    sample.manifest.suffix_len = spec.suffix_len;
    sample.manifest.frame_count = static_cast<std::uint32_t>(sample.sequence.embeddings.size());
    sample.manifest.seed = spec.seed;
    sample.manifest.source_a = options.source_a.string();
    sample.manifest.source_b = options.source_b.string();
    write_sample_dir(options.out, sample);
}

std::vector<Verdict> run_detect(const DetectCmdOptions& options) {
    ClassifierConfig config = resolve_config(options.preset_name, options.config_path);
    if (options.window_long) config.features.window_long = *options.window_long;
    if (options.window_short) config.features.window_short = *options.window_short;

    const std::vector<FrameEmbedding> frames = load_embeddings(options.input);
    std::vector<Verdict> verdicts = classify_stream(frames, config);
    if (options.out) write_verdicts(*options.out, verdicts);
    return verdicts;
}

GateResult run_gate_cmd(const GateCmdOptions& options) {
    const std::vector<FrameEmbedding> frames = load_embeddings(options.embeddings);
    const std::vector<Verdict> verdicts = read_verdicts(options.verdicts);

    std::optional<std::filesystem::path> pred_path = options.predictions;
    if (!pred_path && std::filesystem::is_directory(options.embeddings) &&
        std::filesystem::exists(options.embeddings / "pred.bin"))
        pred_path = options.embeddings / "pred.bin";

    const GateMode mode =
        options.strict_cadence ? GateMode::StrictCadence : GateMode::DeferCadence;
    GateResult result = run_gate(frames, verdicts, options.write_period, mode);

    std::filesystem::create_directories(options.out);
    write_gate_trace(options.out / "trace.txt", result.trace);
    if (pred_path) {
        const std::vector<BinaryMask> predicted = read_masks(*pred_path);
        const std::vector<BinaryMask> gated = apply_gate_to_masks(predicted, result.trace);
        write_masks(options.out / "gated.bin", gated);
    }
    return result;
}

std::vector<ReportRow> run_eval(const EvalCmdOptions& options) {
    const std::vector<std::filesystem::path> dirs = list_corpus(options.corpus);
    if (dirs.empty()) throw EmptyCorpus("no samples under " + options.corpus.string());

    struct PerSample {
        std::uint32_t length = 0;
        RegionReport report;
    };
    std::vector<PerSample> evaluated(dirs.size());
    const EvalOptions eval_options{options.tolerance, false};

    parallel_for(dirs.size(), [&](std::size_t i) {
        const CorpusSample sample = read_sample_dir(dirs[i]);
        const std::filesystem::path pred_path = dirs[i] / options.pred_name;
        const std::vector<BinaryMask> predictions = read_masks(pred_path);
        evaluated[i].length = sample.manifest.interjection_len;
        evaluated[i].report = evaluate_sample(sample.sequence, predictions, eval_options);
    });

    std::map<std::uint32_t, std::vector<RegionReport>> by_length;
    for (const auto& e : evaluated) by_length[e.length].push_back(e.report);

    std::vector<ReportRow> rows;
    for (const auto& [length, reports] : by_length)
        rows.push_back(aggregate_reports(options.config_label, length, reports));

    if (options.out) {
        std::filesystem::create_directories(*options.out);
        std::ofstream tables(*options.out / "tables.txt", std::ios::trunc);
        tables << format_tables(rows);
        std::ofstream csv(*options.out / "report.csv", std::ios::trunc);
        csv << format_csv(rows);
    }
    return rows;
}

CalibrationResult run_calibrate(const CalibrateCmdOptions& options) {
    const ClassifierConfig template_config =
        resolve_config(options.preset_name, options.template_path);

    const std::vector<std::filesystem::path> dirs = list_corpus(options.corpus);
    if (dirs.empty()) throw EmptyCorpus("no samples under " + options.corpus.string());
    std::vector<SplicedSequence> corpus(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) {
        corpus[i] = read_sample_dir(dirs[i]).sequence;
    });

    CalibrationResult result = calibrate(corpus, template_config);
    if (options.out)
        save_classifier_config(*options.out, result.config, result.calibrated_names);
    return result;
}

RunAllResult run_all(const RunAllCmdOptions& options) {
    const std::vector<std::filesystem::path> dirs = list_corpus(options.corpus);
    if (dirs.empty()) throw EmptyCorpus("no samples under " + options.corpus.string());

    std::vector<CorpusSample> samples(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) { samples[i] = read_sample_dir(dirs[i]); });

    const EvalOptions eval_options{options.tolerance, false};
    RunAllResult result;

    auto aggregate_by_length = [&](const std::string& label,
                                   const std::vector<RegionReport>& reports) {
        std::map<std::uint32_t, std::vector<RegionReport>> by_length;
        for (std::size_t i = 0; i < samples.size(); ++i)
            by_length[samples[i].manifest.interjection_len].push_back(reports[i]);
        for (const auto& [length, group] : by_length)
            result.rows.push_back(aggregate_reports(label, length, group));
    };

    // Ungated baseline: the raw simulated predictions.
    {
        std::vector<RegionReport> reports(samples.size());
        parallel_for(samples.size(), [&](std::size_t i) {
            reports[i] =
                evaluate_sample(samples[i].sequence, predictions_for(samples[i]), eval_options);
        });
        aggregate_by_length("baseline", reports);
    }

    std::filesystem::create_directories(options.out / "configs");
    for (const std::string& name : options.presets) {
        ClassifierConfig config = preset(name);
        std::vector<std::string> calibrated_names;

        const bool has_free =
            std::any_of(config.constants.begin(), config.constants.end(),
                        [](const ConstantDef& c) { return c.free; });
        if (has_free) {
            std::vector<SplicedSequence> corpus;
            corpus.reserve(samples.size());
            for (const auto& s : samples) corpus.push_back(s.sequence);
            CalibrationResult calibration = calibrate(corpus, config);
            config = calibration.config;
            calibrated_names = calibration.calibrated_names;
            result.calibrations.emplace_back(name, std::move(calibration));
        }
        save_classifier_config(options.out / "configs" / (name + ".cfg"), config,
                               calibrated_names);

        std::vector<RegionReport> reports(samples.size());
        parallel_for(samples.size(), [&](std::size_t i) {
            const std::vector<BinaryMask> predicted = predictions_for(samples[i]);
            std::vector<BinaryMask> final_masks = predicted;
            if (options.gate_enabled) {
                const std::vector<Verdict> verdicts =
                    classify_stream(samples[i].sequence.embeddings, config);
                const GateResult gate = run_gate(samples[i].sequence.embeddings, verdicts,
                                                 options.write_period);
                final_masks = apply_gate_to_masks(predicted, gate.trace);
            }
            reports[i] = evaluate_sample(samples[i].sequence, final_masks, eval_options);
        });
        aggregate_by_length(name + "+", reports);
    }

    result.tables_text = format_tables(result.rows);
    result.csv_text = format_csv(result.rows);
    std::ofstream tables(options.out / "tables.txt", std::ios::trunc);
    tables << result.tables_text;
    std::ofstream csv(options.out / "report.csv", std::ios::trunc);
    csv << result.csv_text;
    return result;
}

} // namespace cutguard
