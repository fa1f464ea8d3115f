#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qipf {

/// A finite real-valued sample sequence with optional provenance.
struct Signal {
    std::vector<double> samples;
    std::optional<double> sample_rate_hz;
    std::string label;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    std::span<const double> view() const { return samples; }
};

/// Gaussian kernel width plus numerical guards.
struct KernelConfig {
    double sigma = 0.5;       // kernel width, same units as samples
    double epsilon = 1e-8;    // division guard for mode wave-function zeros
    double fd_step = 1e-4;    // finite-difference step (test oracles)

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::domain_error("KernelConfig: sigma must be positive and finite");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon))
            throw std::domain_error("KernelConfig: epsilon must be positive and finite");
        if (!(fd_step > 0.0) || !std::isfinite(fd_step))
            throw std::domain_error("KernelConfig: fd_step must be positive and finite");
    }
};

inline void validate_signal(const Signal& s) {
    if (s.samples.empty())
        throw std::domain_error("Signal: sample sequence is empty");
    for (double v : s.samples)
        if (!std::isfinite(v))
            throw std::domain_error("Signal: non-finite sample");
}

}  // namespace qipf
