#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cutguard/calibrate.hpp"
#include "cutguard/classifier.hpp"
#include "cutguard/dataset.hpp"
#include "cutguard/memory_gate.hpp"
#include "cutguard/metrics.hpp"

namespace cutguard {

// Library-level bodies of the CLI subcommands. The binary in tools/ is a thin
// flag parser over these, so tests can compare each subcommand against the
// underlying module operations directly.

struct SynthCmdOptions {
    std::filesystem::path out;
    std::vector<std::uint32_t> lengths = {4, 16, 128, 512};
    std::size_t samples = 25; // per length
    std::uint32_t dim = 64;
    std::uint32_t prefix = 12;
    std::uint32_t suffix = 12;
    double step = 0.05; // within-video drift scale
    double gap = 0.5;   // cross-video offset per element (>= 10x step: separable)
    bool spikes = true; // pan spike on every odd sample, alternating prefix/suffix
    double spike_magnitude = 3.0;
    std::uint64_t seed = 42;
    std::uint32_t mask_width = 32;
    std::uint32_t mask_height = 32;
};

// SynthSpec for one sample of the corpus recipe (the spike placement rule
// lives here so tests can reproduce samples without touching the filesystem).
SynthSpec synth_recipe(const SynthCmdOptions& options, std::uint32_t length, std::size_t k);
std::string sample_id(std::uint32_t length, std::size_t k);

// Writes <out>/<sample_id>/{emb.bin, mask.bin, pred.bin, labels.txt,
// manifest.json}. Returns the number of samples written.
std::size_t run_synth(const SynthCmdOptions& options);

struct SpliceCmdOptions {
    std::filesystem::path source_a; // CUTGEMB1 file
    std::filesystem::path source_b;
    std::optional<std::filesystem::path> masks_a; // CUTGMSK1 for a (ground truth)
    std::uint32_t prefix = 12;
    std::uint32_t suffix = 12;
    std::uint32_t length = 4;
    std::uint64_t seed = 0;
    std::filesystem::path out; // sample directory
};
void run_splice(const SpliceCmdOptions& options);

struct DetectCmdOptions {
    std::filesystem::path input; // CUTGEMB1 file or a sample directory
    std::optional<std::string> preset_name;
    std::optional<std::filesystem::path> config_path;
    std::optional<std::filesystem::path> out; // verdict log
    std::optional<std::size_t> window_long;
    std::optional<std::size_t> window_short;
};
std::vector<Verdict> run_detect(const DetectCmdOptions& options);

struct GateCmdOptions {
    std::filesystem::path embeddings; // CUTGEMB1 file or a sample directory
    std::filesystem::path verdicts;   // verdict log from detect
    std::optional<std::filesystem::path> predictions; // CUTGMSK1; defaults to pred.bin of a sample dir
    std::uint32_t write_period = 5;
    bool strict_cadence = false;
    std::filesystem::path out; // directory: trace.txt (+ gated.bin when masks present)
};
GateResult run_gate_cmd(const GateCmdOptions& options);

struct EvalCmdOptions {
    std::filesystem::path corpus;
    std::string pred_name = "pred.bin"; // mask file evaluated inside each sample dir
    std::string config_label = "baseline";
    std::uint32_t tolerance = 1;
    std::optional<std::filesystem::path> out; // directory for tables.txt/report.csv
};
std::vector<ReportRow> run_eval(const EvalCmdOptions& options);

struct CalibrateCmdOptions {
    std::filesystem::path corpus;
    std::optional<std::string> preset_name;
    std::optional<std::filesystem::path> template_path;
    std::optional<std::filesystem::path> out; // config file
};
CalibrationResult run_calibrate(const CalibrateCmdOptions& options);

struct RunAllCmdOptions {
    std::filesystem::path corpus;
    std::filesystem::path out; // directory
    std::vector<std::string> presets = {"cutie", "xmem", "sam2"};
    std::uint32_t write_period = 5;
    std::uint32_t tolerance = 1;
    bool gate_enabled = true; // off evaluates raw predictions only
};

struct RunAllResult {
    std::vector<ReportRow> rows;
    std::string tables_text;
    std::string csv_text;
    std::vector<std::pair<std::string, CalibrationResult>> calibrations;
};

// End to end over a stored corpus: baseline row from the raw predictions,
// then one calibrated+gated row per preset ("<preset>+"). Calibration runs
// against the same corpus, mirroring a train-set table. Writes tables.txt,
// report.csv, and configs/<preset>.cfg under `out`.
RunAllResult run_all(const RunAllCmdOptions& options);

} // namespace cutguard
