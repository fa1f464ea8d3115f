#include "qipf/wavefunction.hpp"

#include <cmath>

#include "qipf/errors.hpp"

namespace qipf {

namespace detail {

KernelSums kernel_sums(double x, std::span<const double> xs, double sigma) {
    const double inv_s2 = 1.0 / (sigma * sigma);
    const double inv_2s2 = 0.5 * inv_s2;
    KernelSums acc;
    for (double xi : xs) {
        const double u = x - xi;
        const double g = std::exp(-u * u * inv_2s2);
        acc.s0 += g;
        acc.s1 += -u * inv_s2 * g;
        acc.s2 += (u * u * inv_s2 - 1.0) * inv_s2 * g;
    }
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    acc.s0 *= inv_n;
    acc.s1 *= inv_n;
    acc.s2 *= inv_n;
    return acc;
}

PsiEval psi_from_sums(double x, const KernelSums& s) {
    if (!(s.s0 > 0.0))
        throw NumericError(0, 0, "wave-function underflow: all samples too far from x");
    PsiEval pe;
    pe.x = x;
    pe.psi = std::sqrt(s.s0);
    pe.dpsi = s.s1 / (2.0 * pe.psi);
    pe.d2psi = s.s2 / (2.0 * pe.psi) - (s.s1 * s.s1) / (4.0 * s.s0 * pe.psi);
    return pe;
}

}  // namespace detail

PsiEval psi_eval(double x, const Signal& samples, const KernelConfig& cfg) {
    validate_signal(samples);
    cfg.validate();
    if (!std::isfinite(x))
        throw std::domain_error("psi_eval: non-finite evaluation point");
    return detail::psi_from_sums(x, detail::kernel_sums(x, samples.view(), cfg.sigma));
}

void hermite_sequence_into(double y, std::span<double> out) {
    if (out.empty())
        return;
    out[0] = 1.0;
    if (out.size() == 1)
        return;
    out[1] = 2.0 * y;
    for (std::size_t n = 1; n + 1 < out.size(); ++n)
        out[n + 1] = 2.0 * y * out[n] - 2.0 * static_cast<double>(n) * out[n - 1];
}

std::vector<double> hermite_sequence(double y, int max_order) {
    if (max_order < 0)
        throw std::domain_error("hermite_sequence: max_order must be >= 0");
    std::vector<double> h(static_cast<std::size_t>(max_order) + 1);
    hermite_sequence_into(y, h);
    return h;
}

std::vector<double> hermite_normalization(int max_order) {
    if (max_order < 0)
        throw std::domain_error("hermite_normalization: max_order must be >= 0");
    if (max_order > 170)
        throw std::overflow_error("hermite_normalization: order beyond factorial range");
    std::vector<double> c(static_cast<std::size_t>(max_order) + 1);
    c[0] = 1.0 / std::sqrt(std::sqrt(M_PI));  // pi^{-1/4}
    for (int n = 1; n <= max_order; ++n)
        c[n] = c[n - 1] / std::sqrt(2.0 * static_cast<double>(n));
    return c;
}

std::vector<double> hermite_normalized(std::span<const double> values,
                                       std::span<const int> orders) {
    if (values.size() != orders.size())
        throw std::domain_error("hermite_normalized: values/orders size mismatch");
    int max_order = 0;
    for (int n : orders) {
        if (n < 0)
            throw std::domain_error("hermite_normalized: negative order");
        max_order = std::max(max_order, n);
    }
    const std::vector<double> c = hermite_normalization(max_order);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = values[i] * c[static_cast<std::size_t>(orders[i])];
    return out;
}

ModeEval mode_wavefunction(const PsiEval& pe, int k, const ModeSpec& spec) {
    spec.validate();
    if (k < 1 || k > spec.num_modes)
        throw std::domain_error("mode_wavefunction: mode index out of range");
    const int n = ModeSpec::hermite_order(k);
    const std::vector<double> h = hermite_sequence(pe.psi, n);
    double scale = 1.0;
    if (spec.normalize)
        scale = hermite_normalization(n)[static_cast<std::size_t>(n)];
    const double hn = h[static_cast<std::size_t>(n)] * scale;
    const double dn = 2.0 * n * h[static_cast<std::size_t>(n - 1)] * scale;
    const double d2n = 4.0 * n * (n - 1.0) * h[static_cast<std::size_t>(n - 2)] * scale;
    ModeEval me;
    me.psi_k = hn;
    me.lap_psi_k = d2n * pe.dpsi * pe.dpsi + dn * pe.d2psi;
    return me;
}

}  // namespace qipf
