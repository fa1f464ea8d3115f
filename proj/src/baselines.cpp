#include "qipf/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "qipf/core_kernel.hpp"
#include "qipf/wavefunction.hpp"

namespace qipf {

void SurpriseConfig::validate() const {
    kernel.validate();
    if (grid.size() < 16)
        throw std::domain_error("SurpriseConfig: grid needs at least 16 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::domain_error("SurpriseConfig: grid must be strictly increasing");
    if (window && *window < 1)
        throw std::domain_error("SurpriseConfig: window must be >= 1");
}

std::vector<double> make_surprise_grid(const Signal& signal, double sigma, int points) {
    validate_signal(signal);
    if (points < 16)
        throw std::domain_error("make_surprise_grid: need at least 16 points");
    const auto [mn, mx] = std::minmax_element(signal.samples.begin(), signal.samples.end());
    const double lo = *mn - 3.0 * sigma;
    const double hi = *mx + 3.0 * sigma;
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
    return grid;
}

namespace {

// Trapezoidal quadrature weights for a (possibly uneven) grid.
std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const std::size_t g = grid.size();
    std::vector<double> w(g);
    w[0] = 0.5 * (grid[1] - grid[0]);
    w[g - 1] = 0.5 * (grid[g - 1] - grid[g - 2]);
    for (std::size_t i = 1; i + 1 < g; ++i)
        w[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    return w;
}

// Renormalize weighted kernel sums into a probability vector over the grid.
void to_distribution(const std::vector<double>& kernel_sums, const std::vector<double>& w,
                     std::vector<double>& out) {
    double total = 0.0;
    for (std::size_t i = 0; i < kernel_sums.size(); ++i) {
        out[i] = w[i] * kernel_sums[i];
        total += out[i];
    }
    const double inv = 1.0 / total;
    for (double& v : out)
        v *= inv;
}

}  // namespace

std::vector<double> bayesian_surprise(const Signal& signal, const SurpriseConfig& cfg) {
    validate_signal(signal);
    cfg.validate();
    if (signal.size() < 2)
        throw std::domain_error("bayesian_surprise: need at least 2 samples");

    const auto& xs = signal.samples;
    const std::size_t n = xs.size();
    const std::size_t g = cfg.grid.size();
    const std::vector<double> w = trapezoid_weights(cfg.grid);
    const double sigma = cfg.kernel.sigma;
    const double floor_p = cfg.kernel.epsilon;

    std::vector<double> out(n, 0.0);
    std::vector<double> prior(g), posterior(g);
    std::vector<double> sums(g, 0.0);

    auto add_sample = [&](std::vector<double>& acc, double x, double sign) {
        for (std::size_t j = 0; j < g; ++j)
            acc[j] += sign * gaussian_kernel(cfg.grid[j] - x, sigma);
    };

    // With a window the sums slide incrementally (add the new sample,
    // subtract the one that left); the accumulated rounding drift over a
    // desk-scale stream is ~1e-10 and vanishes under renormalization.
    add_sample(sums, xs[0], 1.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (cfg.window) {
            const std::size_t wlen = static_cast<std::size_t>(*cfg.window);
            to_distribution(sums, w, prior);
            add_sample(sums, xs[i], 1.0);
            if (i >= wlen)
                add_sample(sums, xs[i - wlen], -1.0);
            to_distribution(sums, w, posterior);
        } else {
            to_distribution(sums, w, prior);
            add_sample(sums, xs[i], 1.0);
            to_distribution(sums, w, posterior);
        }
        double kl = 0.0;
        for (std::size_t j = 0; j < g; ++j) {
            const double p = posterior[j];
            if (p <= 0.0)
                continue;
            const double q = std::max(prior[j], floor_p);
            kl += p * std::log(p / q);
        }
        out[i] = kl;
    }
    return out;
}

namespace {

template <typename Fn>
std::vector<double> per_interval(const Signal& signal, int interval_length,
                                 const char* who, Fn&& fn) {
    validate_signal(signal);
    if (interval_length < 1)
        throw std::domain_error(std::string(who) + ": interval_length must be >= 1");
    const std::size_t len = static_cast<std::size_t>(interval_length);
    const std::size_t count = signal.size() / len;
    if (count < 1)
        throw std::domain_error(std::string(who) + ": signal shorter than one interval");
    std::vector<double> out(count);
    for (std::size_t r = 0; r < count; ++r) {
        Signal chunk;
        chunk.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(r * len),
                             signal.samples.begin() + static_cast<std::ptrdiff_t>((r + 1) * len));
        out[r] = fn(chunk);
    }
    return out;
}

}  // namespace

std::vector<double> interval_entropies(const Signal& signal, int interval_length,
                                       const KernelConfig& cfg) {
    cfg.validate();
    return per_interval(signal, interval_length, "interval_entropies",
                        [&](const Signal& s) { return renyi_quadratic_entropy(s, cfg); });
}

std::vector<double> interval_information_potentials(const Signal& signal,
                                                    int interval_length,
                                                    const KernelConfig& cfg) {
    cfg.validate();
    return per_interval(signal, interval_length, "interval_information_potentials",
                        [&](const Signal& s) { return information_potential(s, cfg); });
}

std::vector<double> entropy_difference(const Signal& signal, int interval_length,
                                       const KernelConfig& cfg) {
    if (interval_length < 1 ||
        signal.size() < 2 * static_cast<std::size_t>(interval_length))
        throw std::domain_error("entropy_difference: need at least two full intervals");
    const std::vector<double> h = interval_entropies(signal, interval_length, cfg);
    std::vector<double> out(h.size() - 1);
    for (std::size_t r = 0; r + 1 < h.size(); ++r)
        out[r] = h[r + 1] - h[r];
    return out;
}

std::vector<double> classical_ip_stream(const Signal& signal, const KernelConfig& cfg,
                                        std::optional<int> window) {
    validate_signal(signal);
    cfg.validate();
    if (signal.size() < 2)
        throw std::domain_error("classical_ip_stream: need at least 2 samples");
    if (window && *window < 2)
        throw std::domain_error("classical_ip_stream: window must be >= 2");
    const auto xs = signal.view();
    std::vector<double> out;
    out.reserve(xs.size() - 1);
    for (std::size_t i = 2; i <= xs.size(); ++i) {
        std::size_t lo = 1;
        if (window) {
            const std::size_t wlen = static_cast<std::size_t>(*window);
            if (i > wlen)
                lo = i - wlen + 1;
        }
        const auto past = xs.subspan(lo - 1, (i - 1) - lo + 1);
        // Shares the engine's fused accumulator so the stream matches the
        // decomposition trace's ipf channel bit for bit.
        out.push_back(detail::kernel_sums(xs[i - 1], past, cfg.sigma).s0);
    }
    return out;
}

}  // namespace qipf
