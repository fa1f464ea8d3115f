#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qipf/analysis.hpp"
#include "qipf/engine.hpp"
#include "qipf/signal.hpp"
#include "qipf/signals.hpp"

namespace qipf {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Signal source for an experiment: a generator with parameters, or a file.
struct SignalSpec {
    std::string kind = "sine";  // lorenz | mackey_glass | sine | sine_mixture | file
    LorenzParams lorenz;
    MackeyGlassParams mackey_glass;
    double f0 = 100.0;
    double fs = 8000.0;
    double duration = 0.16;
    std::vector<double> freqs;
    std::string path;
    std::string format = "csv";  // csv | raw
    bool normalize = true;
    double scale = 1.0;
};

struct GridSpec {
    int points = 400;
    std::optional<double> lo;
    std::optional<double> hi;  // absent: span the signal's range +- 2 sigma
};

struct SensitivitySpec {
    int interval_length = 500;
    std::vector<std::array<int, 2>> state_groups = {{1, 3}, {4, 6}, {7, 10}};
    int runs = 10;
    bool normalize_per_framework = true;
    std::optional<std::pair<double, double>> db_range;
};

struct ExperimentConfig {
    std::string experiment;  // spatial | causal_compare | dominance | eigencurve | heatmap | sensitivity
    SignalSpec signal;
    KernelConfig kernel{0.3, 1e-8, 1e-3};
    std::vector<double> kernel_widths;  // spatial / sensitivity columns; empty = {kernel.sigma}
    int modes = 6;
    bool hermite_normalize = true;
    std::optional<int> window;
    EigenScope eigen_scope = EigenScope::history;
    bool include_current = false;
    std::optional<std::vector<NoiseInterval>> noise_intervals;
    SensitivitySpec sensitivity;
    GridSpec grid;
    std::vector<int> compare_modes = {5, 10};
    std::vector<std::array<int, 2>> groups = {{1, 4}, {10, 13}, {22, 25}};  // heatmap averages
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // heatmap: one run per seed; empty = {seed}
    std::string output_dir;
    bool plots = false;
};

/// Parse and validate a config file (or a previously emitted manifest,
/// which embeds its config). Throws ConfigError naming the bad field.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Materialize the configured signal (generator or file, then optional
/// normalize and scale).
Signal build_signal(const SignalSpec& spec);

/// Resolution order for the output directory: explicit override, then
/// config.output_dir, then $QIPF_OUT_DIR, then "out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::string& override_dir);

/// Run the experiment end to end, writing trace/report artifacts and a
/// manifest into the output directory. Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg,
                                                  const std::filesystem::path& outdir);

}  // namespace qipf
