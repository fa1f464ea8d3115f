#pragma once

#include <span>

#include "qipf/signal.hpp"

namespace qipf {

/// Unnormalized Gaussian kernel exp(-u^2 / (2 sigma^2)).
///
/// The bare exponential form is used throughout: the decomposition
/// pipeline is scale-consistent only without the 1/(sigma sqrt(2 pi))
/// Parzen factor. parzen_scale() recovers the density interpretation.
double gaussian_kernel(double u, double sigma);

/// 1/(sigma sqrt(2 pi)); multiply a kernel mean by this to get a
/// Parzen density value.
double parzen_scale(double sigma);

/// Information potential field at x: mean of gaussian_kernel(x - x_i, sigma).
double ipf(double x, const Signal& samples, const KernelConfig& cfg);

/// Scalar information potential: (1/N^2) sum_ij G_{sigma sqrt 2}(x_i - x_j).
double information_potential(const Signal& samples, const KernelConfig& cfg);

/// Renyi's quadratic entropy estimate: -log(information_potential).
double renyi_quadratic_entropy(const Signal& samples, const KernelConfig& cfg);

namespace detail {

/// Unvalidated kernel mean over a raw sample span (hot path).
double kernel_mean(double x, std::span<const double> xs, double sigma);

}  // namespace detail

}  // namespace qipf
