#pragma once

#include <optional>
#include <vector>

#include "qipf/signal.hpp"

namespace qipf {

/// Model space for Bayesian surprise: a fixed grid over the dynamic
/// range, with the Parzen density (Gaussian windows) as the model.
struct SurpriseConfig {
    std::vector<double> grid;  // strictly increasing, >= 16 points
    KernelConfig kernel;
    std::optional<int> window;

    void validate() const;
};

/// 256 evenly spaced points spanning [min - 3 sigma, max + 3 sigma] of
/// the signal's dynamic range.
std::vector<double> make_surprise_grid(const Signal& signal, double sigma, int points = 256);

/// Per-sample expected KL divergence between the gridded Parzen prior
/// (samples before i) and posterior (including sample i). First sample
/// reports 0 by convention.
std::vector<double> bayesian_surprise(const Signal& signal, const SurpriseConfig& cfg);

/// Renyi quadratic entropy of each consecutive non-overlapping interval.
std::vector<double> interval_entropies(const Signal& signal, int interval_length,
                                       const KernelConfig& cfg);

/// Scalar information potential of each consecutive non-overlapping
/// interval (the number whose negative log is the interval entropy).
std::vector<double> interval_information_potentials(const Signal& signal,
                                                    int interval_length,
                                                    const KernelConfig& cfg);

/// H(R+1) - H(R) over consecutive intervals.
std::vector<double> entropy_difference(const Signal& signal, int interval_length,
                                       const KernelConfig& cfg);

/// Causal classical IPF: at sample i, the IPF at x_i over the trailing
/// past samples. One value per signal position i = 2..N, matching the
/// decomposition trace rows bit for bit.
std::vector<double> classical_ip_stream(const Signal& signal, const KernelConfig& cfg,
                                        std::optional<int> window = std::nullopt);

}  // namespace qipf
