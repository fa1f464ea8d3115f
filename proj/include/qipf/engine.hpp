#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qipf/signal.hpp"
#include "qipf/wavefunction.hpp"

namespace qipf {

enum class EigenScope {
    history,  // running min over all processed samples
    window    // min over the trailing window only
};

struct EngineConfig {
    KernelConfig kernel;
    ModeSpec modes;
    std::optional<int> window;  // trailing samples used per step; absent = all past
    EigenScope eigen_scope = EigenScope::history;
    // Algorithm parity: whether the kernel sum at sample i includes x_i
    // itself. Causal experiments keep it excluded.
    bool include_current = false;

    void validate() const;
};

/// Per-mode running state for the empirical eigenvalue
/// E^k = -min over accepted samples of the Laplacian ratio.
struct ModeState {
    int k = 0;
    double running_min_ratio = std::numeric_limits<double>::infinity();
    bool any_accepted = false;

    double eigenvalue() const { return any_accepted ? -running_min_ratio : 0.0; }
};

/// Fold one Laplacian ratio into the running minimum. Non-finite ratios
/// are skipped (the caller flags the sample).
ModeState eigen_update(ModeState state, double ratio);

/// Sample-by-sample decomposition output. Rows cover signal positions
/// i = 2..N (1-based); per-mode arrays are row-major [row * modes + (k-1)].
struct DecompositionTrace {
    int modes = 0;
    std::vector<long> index;  // 1-based sample position, starts at 2
    std::vector<double> x;    // evaluation point per row
    std::vector<double> psi;
    std::vector<double> ipf;                // classical IPF at x from the same past set
    std::vector<double> fundamental_ratio;  // sigma^2/2 * lap(psi)/psi
    std::vector<double> fundamental_eigen;
    std::vector<double> ratio;
    std::vector<double> eigen;
    std::vector<double> qipf;
    std::vector<std::uint8_t> flagged;  // division guard hit or non-finite ratio
    long flagged_count = 0;
    // Harmonic-ladder energy per mode: the running extremum of the
    // pole-free oscillator term sigma^2/2 * ((2n+1) - psi^2) * dpsi^2 at
    // order n = 2k. Unlike the min-ratio eigenvalue it has no division
    // singularities, so it grows strictly with the mode order and backs
    // the eigenvalue-curve report. Empty for traces read back from CSV.
    std::vector<double> ladder_energy;

    std::size_t rows() const { return index.size(); }
    std::size_t cell(std::size_t row, int k) const {
        return row * static_cast<std::size_t>(modes) + static_cast<std::size_t>(k - 1);
    }
    double ratio_at(std::size_t row, int k) const { return ratio[cell(row, k)]; }
    double eigen_at(std::size_t row, int k) const { return eigen[cell(row, k)]; }
    double qipf_at(std::size_t row, int k) const { return qipf[cell(row, k)]; }
    bool flagged_at(std::size_t row, int k) const { return flagged[cell(row, k)] != 0; }
};

/// Streaming decomposition: at each sample x_i the wave-function is built
/// from the trailing past samples only.
DecompositionTrace decompose_stream(const Signal& signal, const EngineConfig& cfg);

/// Same causal sweep but the wave-function at step i is evaluated at
/// eval_points[i-1] instead of x_i (the stream still advances by the
/// signal's samples). Requires eval_points.size() == signal length.
DecompositionTrace decompose_stream_at(std::span<const double> eval_points,
                                       const Signal& signal, const EngineConfig& cfg);

/// Batch evaluation over a spatial grid using all samples at once;
/// eigenvalues come from the grid-wide min, which forces
/// min over the grid of qipf to be exactly zero per mode.
struct SpatialResult {
    int modes = 0;
    std::vector<double> grid;
    std::vector<double> psi;
    std::vector<double> ipf;
    std::vector<double> fundamental_ratio;
    double fundamental_eigen = 0.0;
    std::vector<double> ratio;  // row-major grid x modes
    std::vector<double> qipf;
    std::vector<double> eigenvalue;  // per mode
    std::vector<std::uint8_t> flagged;

    std::size_t cell(std::size_t g, int k) const {
        return g * static_cast<std::size_t>(modes) + static_cast<std::size_t>(k - 1);
    }
};

SpatialResult spatial_qipf(std::span<const double> grid, const Signal& samples,
                           const EngineConfig& cfg);

/// Arithmetic mean of qipf(i, k) over modes k_lo..k_hi, per row.
std::vector<double> mode_average(const DecompositionTrace& trace, int k_lo, int k_hi);

}  // namespace qipf
