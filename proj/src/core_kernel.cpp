#include "qipf/core_kernel.hpp"

#include <cmath>

namespace qipf {

double gaussian_kernel(double u, double sigma) {
    if (!std::isfinite(u))
        throw std::domain_error("gaussian_kernel: non-finite input");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("gaussian_kernel: sigma must be positive");
    return std::exp(-(u * u) / (2.0 * sigma * sigma));
}

double parzen_scale(double sigma) {
    return 1.0 / (sigma * std::sqrt(2.0 * M_PI));
}

namespace detail {

double kernel_mean(double x, std::span<const double> xs, double sigma) {
    const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
    double acc = 0.0;
    for (double xi : xs) {
        const double u = x - xi;
        acc += std::exp(-u * u * inv_2s2);
    }
    return acc / static_cast<double>(xs.size());
}

}  // namespace detail

double ipf(double x, const Signal& samples, const KernelConfig& cfg) {
    validate_signal(samples);
    cfg.validate();
    if (!std::isfinite(x))
        throw std::domain_error("ipf: non-finite evaluation point");
    return detail::kernel_mean(x, samples.view(), cfg.sigma);
}

double information_potential(const Signal& samples, const KernelConfig& cfg) {
    validate_signal(samples);
    cfg.validate();
    const auto& xs = samples.samples;
    const double w = cfg.sigma * std::sqrt(2.0);  // pairwise differences carry width sigma*sqrt(2)
    const double inv_2w2 = 1.0 / (2.0 * w * w);
    double acc = 0.0;
    for (double xi : xs)
        for (double xj : xs) {
            const double u = xi - xj;
            acc += std::exp(-u * u * inv_2w2);
        }
    const double n = static_cast<double>(xs.size());
    return acc / (n * n);
}

double renyi_quadratic_entropy(const Signal& samples, const KernelConfig& cfg) {
    return -std::log(information_potential(samples, cfg));
}

}  // namespace qipf
