// cutguard: camera-cut / frame-interjection detection over embedding streams,
// working-memory gating, synthetic corpora, calibration, and region-wise
// evaluation reports. Thin flag layer over cutguard/pipeline.hpp.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cutguard/errors.hpp"
#include "cutguard/pipeline.hpp"

namespace {

struct CliState {
    cutguard::SynthCmdOptions synth;
    cutguard::SpliceCmdOptions splice;
    cutguard::DetectCmdOptions detect;
    cutguard::GateCmdOptions gate;
    cutguard::EvalCmdOptions eval;
    cutguard::CalibrateCmdOptions calibrate;
    cutguard::RunAllCmdOptions run_all;

    // CLI11 needs addressable storage for optional flags.
    std::string detect_preset, detect_config, detect_out;
    std::size_t detect_window_long = 0, detect_window_short = 0;
    std::string splice_masks_a;
    std::string gate_predictions;
    std::string eval_out;
    std::string calibrate_preset, calibrate_template, calibrate_out;
    bool no_spikes = false;
    bool no_gate = false;
};

int dispatch(const std::string& command, CliState& state, CLI::App& app) {
    using namespace cutguard;

    if (command == "synth") {
        state.synth.spikes = !state.no_spikes;
        const std::size_t n = run_synth(state.synth);
        std::cout << "wrote " << n << " samples under " << state.synth.out.string() << '\n';
        return 0;
    }
    if (command == "splice") {
        if (!state.splice_masks_a.empty()) state.splice.masks_a = state.splice_masks_a;
        run_splice(state.splice);
        std::cout << "wrote sample " << state.splice.out.string() << '\n';
        return 0;
    }
    if (command == "detect") {
        if (!state.detect_preset.empty()) state.detect.preset_name = state.detect_preset;
        if (!state.detect_config.empty()) state.detect.config_path = state.detect_config;
        if (!state.detect_out.empty()) state.detect.out = state.detect_out;
        if (state.detect_window_long) state.detect.window_long = state.detect_window_long;
        if (state.detect_window_short) state.detect.window_short = state.detect_window_short;
        const auto verdicts = run_detect(state.detect);
        std::size_t interjections = 0;
        for (const auto& v : verdicts) interjections += v.is_interjection;
        std::cout << verdicts.size() << " frames classified, " << interjections
                  << " interjections\n";
        if (!state.detect.out)
            for (const auto& v : verdicts)
                std::cout << v.frame_index << ' '
                          << (v.is_interjection ? "interjection" : "clean") << ' '
                          << v.fired_rule << '\n';
        return 0;
    }
    if (command == "gate") {
        if (!state.gate_predictions.empty()) state.gate.predictions = state.gate_predictions;
        const auto result = run_gate_cmd(state.gate);
        std::cout << "buffer holds " << result.buffer.entries.size() << " frames; trace in "
                  << (state.gate.out / "trace.txt").string() << '\n';
        return 0;
    }
    if (command == "eval") {
        if (!state.eval_out.empty()) state.eval.out = state.eval_out;
        const auto rows = run_eval(state.eval);
        std::cout << format_tables(rows);
        return 0;
    }
    if (command == "calibrate") {
        if (!state.calibrate_preset.empty()) state.calibrate.preset_name = state.calibrate_preset;
        if (!state.calibrate_template.empty())
            state.calibrate.template_path = state.calibrate_template;
        if (!state.calibrate_out.empty()) state.calibrate.out = state.calibrate_out;
        const auto result = run_calibrate(state.calibrate);
        std::cout << "calibrated " << result.config.name << ": accuracy " << result.train_accuracy
                  << ", false positives " << result.false_positive_count << ", recall "
                  << result.recall << ", margin " << result.margin << '\n';
        return 0;
    }
    if (command == "run-all") {
        state.run_all.gate_enabled = !state.no_gate;
        const auto result = run_all(state.run_all);
        std::cout << result.tables_text;
        return 0;
    }
    std::cerr << app.help();
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"camera-cut detection and working-memory gating toolkit"};
    app.require_subcommand(1);
    CliState state;

    auto* synth = app.add_subcommand("synth", "generate a synthetic spliced corpus");
    synth->add_option("--out", state.synth.out, "corpus output directory")->required();
    synth->add_option("--lengths", state.synth.lengths, "interjection lengths (0 = clean)")
        ->delimiter(',');
    synth->add_option("--samples", state.synth.samples, "samples per length");
    synth->add_option("--dim", state.synth.dim, "embedding dimensionality");
    synth->add_option("--prefix", state.synth.prefix, "prefix length in frames");
    synth->add_option("--suffix", state.synth.suffix, "suffix length in frames");
    synth->add_option("--step", state.synth.step, "within-video drift scale");
    synth->add_option("--gap", state.synth.gap, "cross-video gap per element");
    synth->add_option("--spike-magnitude", state.synth.spike_magnitude,
                      "pan spike magnitude, in steps");
    synth->add_flag("--no-spikes", state.no_spikes, "disable pan-spike hazards");
    synth->add_option("--seed", state.synth.seed, "corpus seed");
    synth->add_option("--mask-width", state.synth.mask_width, "mask width in pixels");
    synth->add_option("--mask-height", state.synth.mask_height, "mask height in pixels");

    auto* splice = app.add_subcommand("splice", "splice two embedding sources into a sample");
    splice->add_option("--a", state.splice.source_a, "source a embeddings (CUTGEMB1)")->required();
    splice->add_option("--b", state.splice.source_b, "source b embeddings (CUTGEMB1)")->required();
    splice->add_option("--masks-a", state.splice_masks_a, "source a masks (CUTGMSK1)");
    splice->add_option("--prefix", state.splice.prefix, "prefix length in frames");
    splice->add_option("--suffix", state.splice.suffix, "suffix length in frames");
    splice->add_option("--length", state.splice.length, "interjection length in frames");
    splice->add_option("--seed", state.splice.seed, "recorded sample seed");
    splice->add_option("--out", state.splice.out, "sample output directory")->required();

    auto* detect = app.add_subcommand("detect", "classify a stream frame by frame");
    detect->add_option("--in", state.detect.input, "embedding file or sample directory")
        ->required();
    detect->add_option("--preset", state.detect_preset, "classifier preset (cutie|xmem|sam2)");
    detect->add_option("--config", state.detect_config, "classifier config file");
    detect->add_option("--out", state.detect_out, "verdict log path");
    detect->add_option("--window-long", state.detect_window_long, "long window override");
    detect->add_option("--window-short", state.detect_window_short, "short window override");

    auto* gate = app.add_subcommand("gate", "apply verdicts to the memory buffer and masks");
    gate->add_option("--in", state.gate.embeddings, "embedding file or sample directory")
        ->required();
    gate->add_option("--verdicts", state.gate.verdicts, "verdict log from detect")->required();
    gate->add_option("--pred", state.gate_predictions, "predicted masks (CUTGMSK1)");
    gate->add_option("--write-period", state.gate.write_period, "memory write cadence");
    gate->add_flag("--strict-cadence", state.gate.strict_cadence,
                   "consume (instead of defer) write slots on interjections");
    gate->add_option("--out", state.gate.out, "output directory")->required();

    auto* eval = app.add_subcommand("eval", "region-wise metrics over a corpus");
    eval->add_option("--corpus", state.eval.corpus, "corpus directory")->required();
    eval->add_option("--pred-name", state.eval.pred_name, "mask file evaluated per sample");
    eval->add_option("--label", state.eval.config_label, "config label for the report rows");
    eval->add_option("--tolerance", state.eval.tolerance, "boundary match tolerance in pixels");
    eval->add_option("--out", state.eval_out, "directory for tables.txt and report.csv");

    auto* calibrate = app.add_subcommand("calibrate", "fit free constants against a corpus");
    calibrate->add_option("--corpus", state.calibrate.corpus, "labeled corpus directory")
        ->required();
    calibrate->add_option("--preset", state.calibrate_preset, "template preset name");
    calibrate->add_option("--template", state.calibrate_template, "template config file");
    calibrate->add_option("--out", state.calibrate_out, "calibrated config output path");

    auto* runall = app.add_subcommand("run-all", "calibrate, detect, gate, and report");
    runall->add_option("--corpus", state.run_all.corpus, "corpus directory")->required();
    runall->add_option("--out", state.run_all.out, "output directory")->required();
    runall->add_option("--presets", state.run_all.presets, "presets to run")->delimiter(',');
    runall->add_option("--write-period", state.run_all.write_period, "memory write cadence");
    runall->add_option("--tolerance", state.run_all.tolerance, "boundary match tolerance");
    runall->add_flag("--no-gate", state.no_gate, "skip gating (baseline passthrough)");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto* sub : app.get_subcommands()) return dispatch(sub->get_name(), state, app);
        std::cerr << app.help();
        return 2;
    } catch (const cutguard::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
