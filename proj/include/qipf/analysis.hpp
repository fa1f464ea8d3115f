#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qipf/engine.hpp"
#include "qipf/signals.hpp"

namespace qipf {

/// Per-mode counts of samples where that mode's instantaneous QIPF
/// response |qipf - eigen| = |ratio| is the maximum across modes. The
/// accumulated eigenvalue offset is excluded: it is set once by the
/// deepest excursion a mode ever had and would otherwise pin the argmax
/// to that single event for the rest of the stream. Ties go to the
/// lowest mode index and are counted separately.
struct DominanceCounts {
    std::vector<long> counts;  // counts[k-1] for mode k
    long ties = 0;
    long total = 0;

    std::vector<double> proportions() const;
};

DominanceCounts dominance_histogram(const DecompositionTrace& trace);

/// Row-normalized (min-max per mode) matrix of QIPF values,
/// modes x samples. Constant rows become all-zero and are flagged.
struct HeatmapMatrix {
    int modes = 0;
    std::size_t samples = 0;
    std::vector<double> values;  // row-major [mode-1][sample]
    std::vector<std::uint8_t> constant_row;

    double at(int k, std::size_t i) const {
        return values[static_cast<std::size_t>(k - 1) * samples + i];
    }
};

HeatmapMatrix heatmap_matrix(const DecompositionTrace& trace);

/// Per-mode energy curve normalized by its maximum. Uses the trace's
/// ladder_energy channel (monotone in the mode order by construction);
/// traces restored from CSV fall back to the final min-ratio eigenvalues.
std::vector<double> eigenvalue_curve(const DecompositionTrace& trace);

/// Mean over modes k_lo..k_hi of |ratio(i, k)| per row: the per-sample
/// response strength of a state group with the eigen offset removed.
std::vector<double> mode_activity_average(const DecompositionTrace& trace, int k_lo,
                                          int k_hi);

struct SensitivityConfig {
    int interval_length = 500;
    std::vector<std::array<int, 2>> state_groups = {{1, 3}, {4, 6}, {7, 10}};
    std::vector<double> noise_db;  // per noisy interval, in order
    int runs = 10;
    bool normalize_per_framework = true;

    void validate() const;
};

/// Sensitivity zeta of a per-sample quantifier sequence: mean over
/// consecutive noisy intervals R of |(:norm V_R: - :norm V_{R+1}:) /
/// (D_R - D_{R+1})|. The last interval_length * noise_db.size() entries
/// of `values` are taken as the noisy region. Pairs with equal dB are
/// excluded. When configured, the whole sequence is normalized to zero
/// mean / unit variance first.
double sensitivity(std::span<const double> values, const SensitivityConfig& cfg);

/// Variant for per-interval scalar sequences (one value per noisy
/// interval, e.g. interval entropies): the interval "norm" is |value|.
double sensitivity_scalar_intervals(std::span<const double> interval_values,
                                    const SensitivityConfig& cfg);

/// Framework x kernel-width sensitivity comparison. Rows: one per QIPF
/// state group (zeta over the group's per-sample activity), Bayesian
/// surprise (per-sample KL with a sliding interval-length model),
/// entropy difference (per-interval Renyi entropies), and classical IP
/// (per-interval information potentials). Cells average over cfg.runs
/// seeded runs; when db_range is set the per-interval dB values are
/// redrawn uniformly within it per run, otherwise the schedule's dB
/// values are reused with per-run noise.
struct SensitivityTable {
    std::vector<std::string> row_labels;
    std::vector<double> widths;
    std::vector<double> cells;  // row-major rows x widths

    double at(std::size_t row, std::size_t col) const {
        return cells[row * widths.size() + col];
    }
};

struct SensitivityTableOptions {
    int qipf_modes = 10;
    bool include_current = false;
    EigenScope eigen_scope = EigenScope::history;
    std::optional<std::pair<double, double>> db_range;  // set: redraw dB per run
    int surprise_grid_points = 256;
};

SensitivityTable sensitivity_table(const Signal& clean, const NoiseSchedule& schedule,
                                   std::span<const double> kernel_widths,
                                   const SensitivityConfig& cfg,
                                   const SensitivityTableOptions& opts = {});

/// Pearson correlation coefficient of two equally sized sequences.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace qipf
