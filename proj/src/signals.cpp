#include "qipf/signals.hpp"

#include <cmath>
#include <random>

#include "qipf/errors.hpp"

namespace qipf {

void LorenzParams::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::domain_error("LorenzParams: dt must be positive");
    if (n_samples < 1)
        throw std::domain_error("LorenzParams: n_samples must be >= 1");
    for (double v : {sigma, rho, beta, x0, y0, z0})
        if (!std::isfinite(v))
            throw std::domain_error("LorenzParams: non-finite parameter");
}

void MackeyGlassParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(n_exp > 0.0))
        throw std::domain_error("MackeyGlassParams: alpha, beta, n must be > 0");
    if (!(tau > 0.0))
        throw std::domain_error("MackeyGlassParams: tau must be > 0");
    if (!(dt > 0.0))
        throw std::domain_error("MackeyGlassParams: dt must be > 0");
    if (tau < dt)
        throw std::domain_error("MackeyGlassParams: tau must be >= dt");
    if (n_samples < 1)
        throw std::domain_error("MackeyGlassParams: n_samples must be >= 1");
    if (!std::isfinite(history_init))
        throw std::domain_error("MackeyGlassParams: non-finite history_init");
}

void NoiseSchedule::validate(std::size_t signal_length) const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (iv.start >= iv.end)
            throw std::domain_error("NoiseSchedule: empty interval");
        if (iv.end > signal_length)
            throw std::domain_error("NoiseSchedule: interval out of signal bounds");
        if (std::isnan(iv.snr_db) || (std::isinf(iv.snr_db) && iv.snr_db < 0.0))
            throw std::domain_error("NoiseSchedule: snr_db must be finite or +inf");
        if (i > 0 && intervals[i - 1].end != iv.start)
            throw std::domain_error("NoiseSchedule: intervals must be contiguous and ordered");
    }
}

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 lorenz_rhs(const Vec3& s, const LorenzParams& p) {
    return {p.sigma * (s.y - s.x), s.x * (p.rho - s.z) - s.y, s.x * s.y - p.beta * s.z};
}

Vec3 axpy(const Vec3& a, double h, const Vec3& d) {
    return {a.x + h * d.x, a.y + h * d.y, a.z + h * d.z};
}

double pick(const Vec3& s, LorenzComponent c) {
    switch (c) {
        case LorenzComponent::x: return s.x;
        case LorenzComponent::y: return s.y;
        default: return s.z;
    }
}

}  // namespace

Signal gen_lorenz(const LorenzParams& p) {
    p.validate();
    Signal out;
    out.label = "lorenz";
    out.sample_rate_hz = 1.0 / p.dt;
    out.samples.reserve(p.n_samples);

    Vec3 s{p.x0, p.y0, p.z0};
    out.samples.push_back(pick(s, p.component));
    for (std::size_t step = 1; step < p.n_samples; ++step) {
        const Vec3 k1 = lorenz_rhs(s, p);
        const Vec3 k2 = lorenz_rhs(axpy(s, 0.5 * p.dt, k1), p);
        const Vec3 k3 = lorenz_rhs(axpy(s, 0.5 * p.dt, k2), p);
        const Vec3 k4 = lorenz_rhs(axpy(s, p.dt, k3), p);
        s.x += p.dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.y += p.dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        s.z += p.dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
            throw NumericError(static_cast<long>(step), 0, "Lorenz integration diverged");
        out.samples.push_back(pick(s, p.component));
    }
    return out;
}

Signal gen_mackey_glass(const MackeyGlassParams& p) {
    p.validate();
    Signal out;
    out.label = "mackey_glass";
    out.sample_rate_hz = 1.0 / p.dt;

    std::vector<double> xs;
    xs.reserve(p.n_samples);
    xs.push_back(p.history_init);  // x at t = 0

    // Delayed lookup with linear interpolation on the step grid;
    // constant pre-history for t <= 0.
    auto delayed = [&](double t) {
        if (t <= 0.0)
            return p.history_init;
        const double pos = t / p.dt;
        const std::size_t j = static_cast<std::size_t>(pos);
        if (j + 1 >= xs.size())
            return xs.back();
        const double frac = pos - static_cast<double>(j);
        return xs[j] + frac * (xs[j + 1] - xs[j]);
    };
    auto rhs = [&](double x, double xd) {
        return p.alpha * xd / (1.0 + std::pow(xd, p.n_exp)) - p.beta * x;
    };

    for (std::size_t step = 1; step < p.n_samples; ++step) {
        const double t = static_cast<double>(step - 1) * p.dt;
        const double x = xs.back();
        const double h = p.dt;
        const double k1 = rhs(x, delayed(t - p.tau));
        const double k2 = rhs(x + 0.5 * h * k1, delayed(t + 0.5 * h - p.tau));
        const double k3 = rhs(x + 0.5 * h * k2, delayed(t + 0.5 * h - p.tau));
        const double k4 = rhs(x + h * k3, delayed(t + h - p.tau));
        const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next))
            throw NumericError(static_cast<long>(step), 0, "Mackey-Glass integration diverged");
        xs.push_back(next);
    }
    out.samples = std::move(xs);
    return out;
}

Signal gen_sine(double f0_hz, double fs_hz, double duration_s) {
    if (!(fs_hz > 0.0) || !(duration_s > 0.0) || !std::isfinite(f0_hz))
        throw std::domain_error("gen_sine: fs and duration must be positive");
    const std::size_t n = static_cast<std::size_t>(fs_hz * duration_s);
    Signal out;
    out.label = "sine";
    out.sample_rate_hz = fs_hz;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = std::sin(2.0 * M_PI * f0_hz * static_cast<double>(i) / fs_hz);
    return out;
}

Signal gen_sine_mixture(std::span<const double> freqs_hz, double fs_hz, double duration_s) {
    if (freqs_hz.empty())
        throw std::domain_error("gen_sine_mixture: no frequency components");
    if (!(fs_hz > 0.0) || !(duration_s > 0.0))
        throw std::domain_error("gen_sine_mixture: fs and duration must be positive");
    const std::size_t n = static_cast<std::size_t>(fs_hz * duration_s);
    Signal out;
    out.label = "sine_mixture";
    out.sample_rate_hz = fs_hz;
    out.samples.assign(n, 0.0);
    for (double f : freqs_hz)
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs_hz);
    return out;
}

Signal normalize(const Signal& signal) {
    validate_signal(signal);
    if (signal.size() < 2)
        throw std::domain_error("normalize: need at least 2 samples");
    const auto& xs = signal.samples;
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double v : xs)
        mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : xs)
        var += (v - mean) * (v - mean);
    var /= n;  // population variance
    if (!(var > 0.0))
        throw std::domain_error("normalize: zero variance");
    const double inv_sd = 1.0 / std::sqrt(var);
    Signal out = signal;
    for (double& v : out.samples)
        v = (v - mean) * inv_sd;
    return out;
}

Signal scale(const Signal& signal, double factor) {
    validate_signal(signal);
    if (!std::isfinite(factor))
        throw std::domain_error("scale: non-finite factor");
    Signal out = signal;
    for (double& v : out.samples)
        v *= factor;
    return out;
}

Signal add_noise(const Signal& signal, const NoiseSchedule& schedule) {
    validate_signal(signal);
    schedule.validate(signal.size());
    Signal out = signal;
    std::mt19937_64 rng(schedule.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& iv : schedule.intervals) {
        if (std::isinf(iv.snr_db) && iv.snr_db > 0.0)
            continue;  // no-noise sentinel
        double power = 0.0;
        for (std::size_t i = iv.start; i < iv.end; ++i)
            power += signal.samples[i] * signal.samples[i];
        power /= static_cast<double>(iv.end - iv.start);
        const double variance = power / std::pow(10.0, iv.snr_db / 10.0);
        const double sd = std::sqrt(variance);
        for (std::size_t i = iv.start; i < iv.end; ++i)
            out.samples[i] += sd * gauss(rng);
    }
    return out;
}

}  // namespace qipf
