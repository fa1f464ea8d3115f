#pragma once

// Independent numerical oracles shared by the unit and acceptance suites.
// These never call the analytic-derivative production paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

inline double fd_first(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd_second(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// |got - want| measured against the larger magnitude, with an absolute
/// floor for values near zero.
inline bool close_rel(double got, double want, double rtol, double atol = 1e-12) {
    const double diff = std::fabs(got - want);
    const double scale = std::max(std::fabs(got), std::fabs(want));
    return diff <= std::max(atol, rtol * scale);
}

namespace detail {

inline long double binomial(int n, int k) {
    long double v = 1.0L;
    for (int i = 1; i <= k; ++i)
        v = v * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return v;
}

/// Central-stencil nth derivative of f at x with step h (long double).
inline long double nth_derivative_stencil(const std::function<long double(long double)>& f,
                                          long double x, int n, long double h) {
    long double acc = 0.0L;
    for (int j = 0; j <= n; ++j) {
        const long double c = binomial(n, j) * ((j % 2 == 0) ? 1.0L : -1.0L);
        acc += c * f(x + (static_cast<long double>(n) / 2.0L - static_cast<long double>(j)) * h);
    }
    return acc / std::pow(h, static_cast<long double>(n));
}

}  // namespace detail

/// Hermite polynomial via the generating function
/// H_n(y) = (-1)^n e^{y^2} d^n/dy^n e^{-y^2},
/// with the derivative taken by nested central differences plus one
/// Richardson step, in extended precision.
inline double hermite_generating_function(int n, double y) {
    const auto g = [](long double t) { return std::exp(-t * t); };
    const long double h = 0.05L;
    const long double d_h = detail::nth_derivative_stencil(g, y, n, h);
    const long double d_h2 = detail::nth_derivative_stencil(g, y, n, h / 2.0L);
    const long double d = (4.0L * d_h2 - d_h) / 3.0L;  // cancel the O(h^2) term
    const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
    return static_cast<double>(sign * std::exp(static_cast<long double>(y) * y) * d);
}

/// Trapezoidal integral of f over [lo, hi] with `steps` panels.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                        int steps) {
    const double h = (hi - lo) / steps;
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < steps; ++i)
        acc += f(lo + h * i);
    return acc * h;
}

/// Deterministic sample-set generator for randomized oracle checks.
struct RandomInstances {
    std::mt19937 rng;

    explicit RandomInstances(std::uint32_t seed) : rng(seed) {}

    std::vector<double> samples(int min_n = 3, int max_n = 40, double spread = 2.0) {
        std::uniform_int_distribution<int> nd(min_n, max_n);
        std::normal_distribution<double> xd(0.0, spread);
        std::vector<double> xs(static_cast<std::size_t>(nd(rng)));
        for (double& v : xs)
            v = xd(rng);
        return xs;
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
};

}  // namespace oracles
