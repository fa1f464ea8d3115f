#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qipf/signal.hpp"

namespace qipf {

enum class LorenzComponent { x, y, z };

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double x0 = 0.0;
    double y0 = 1.0;
    double z0 = 1.05;
    double dt = 0.01;
    std::size_t n_samples = 500;
    LorenzComponent component = LorenzComponent::x;

    void validate() const;
};

struct MackeyGlassParams {
    double alpha = 0.2;
    double beta = 0.1;
    double tau = 30.0;     // delay
    double n_exp = 10.0;   // nonlinearity exponent
    double dt = 0.1;
    std::size_t n_samples = 5000;
    double history_init = 1.2;  // constant pre-history x(t), t <= 0

    void validate() const;
};

/// One heteroscedastic noise segment: sample indices [start, end), 0-based.
/// snr_db = +infinity marks a no-noise segment.
struct NoiseInterval {
    std::size_t start = 0;
    std::size_t end = 0;
    double snr_db = 0.0;
};

struct NoiseSchedule {
    std::vector<NoiseInterval> intervals;  // sorted, contiguous, non-overlapping
    std::uint64_t rng_seed = 0;

    void validate(std::size_t signal_length) const;
};

/// Classical RK4 integration of the Lorenz system, emitting one
/// component per step (the initial state is the first sample).
Signal gen_lorenz(const LorenzParams& p);

/// Fixed-step RK4 for the Mackey-Glass delay equation with linear
/// interpolation into the stored trajectory for the delayed term.
Signal gen_mackey_glass(const MackeyGlassParams& p);

/// sin(2 pi f0 n / fs) for n = 0 .. floor(fs * duration) - 1.
Signal gen_sine(double f0_hz, double fs_hz, double duration_s);

/// Unweighted sum of sine components at the shared sample instants.
Signal gen_sine_mixture(std::span<const double> freqs_hz, double fs_hz, double duration_s);

/// Shift/scale to zero mean and unit population variance.
Signal normalize(const Signal& signal);

/// Multiply every sample by factor.
Signal scale(const Signal& signal, double factor);

/// Add white Gaussian noise per interval; the variance in each interval
/// is the interval's clean signal power divided by 10^(snr_db/10).
/// Samples outside all intervals are passed through untouched.
Signal add_noise(const Signal& signal, const NoiseSchedule& schedule);

}  // namespace qipf
