#pragma once

#include <span>
#include <vector>

#include "qipf/signal.hpp"

namespace qipf {

/// Wave-function value and its first two spatial derivatives at x.
/// psi = sqrt(mean kernel sum), so psi^2 equals the IPF at x.
struct PsiEval {
    double x = 0.0;
    double psi = 0.0;
    double dpsi = 0.0;
    double d2psi = 0.0;
};

/// Mode bookkeeping: mode k maps to the even Hermite order 2k.
/// Mode 0 (the constant H_0 projection) carries no information and is
/// never extracted.
struct ModeSpec {
    int num_modes = 6;
    bool normalize = true;  // scale H_n by 1/sqrt(2^n n! sqrt(pi))

    static int hermite_order(int k) { return 2 * k; }

    void validate() const {
        if (num_modes < 1)
            throw std::domain_error("ModeSpec: num_modes must be >= 1");
        if (hermite_order(num_modes) > 170)
            throw std::overflow_error("ModeSpec: Hermite order beyond factorial range");
    }
};

/// Mode wave-function value H_{2k}(psi) and its spatial Laplacian.
struct ModeEval {
    double psi_k = 0.0;
    double lap_psi_k = 0.0;
};

/// Evaluate psi and its analytic derivatives from all samples.
PsiEval psi_eval(double x, const Signal& samples, const KernelConfig& cfg);

/// Physicists' Hermite polynomials H_0..H_max_order at y via the
/// recurrence H_{n+1} = 2 y H_n - 2 n H_{n-1}.
std::vector<double> hermite_sequence(double y, int max_order);

/// In-place variant; out.size() determines max_order + 1.
void hermite_sequence_into(double y, std::span<double> out);

/// Constants c_n = 1/sqrt(2^n n! sqrt(pi)) for n = 0..max_order;
/// c_n H_n has unit weighted L2 norm against exp(-y^2).
/// Orders above 170 exceed the factorial range.
std::vector<double> hermite_normalization(int max_order);

/// Scale hermite values (values[i] of order orders[i]) to unit norm.
std::vector<double> hermite_normalized(std::span<const double> values,
                                       std::span<const int> orders);

/// Mode wave-function and chain-rule Laplacian for mode k in 1..num_modes:
///   psi_k   = H_{2k}(psi)
///   lap     = H''_{2k}(psi) dpsi^2 + H'_{2k}(psi) d2psi
/// with H'_n = 2n H_{n-1} and H''_n = 4n(n-1) H_{n-2}.
ModeEval mode_wavefunction(const PsiEval& pe, int k, const ModeSpec& spec);

namespace detail {

/// Derivatives of sqrt(S) from the kernel-mean accumulators
/// s0 = mean G, s1 = dS/dx, s2 = d2S/dx2. Throws NumericError when s0
/// underflows to zero (sample_index is attached by the caller).
struct KernelSums {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

KernelSums kernel_sums(double x, std::span<const double> xs, double sigma);
PsiEval psi_from_sums(double x, const KernelSums& s);

}  // namespace detail

}  // namespace qipf
