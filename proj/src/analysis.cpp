#include "qipf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qipf/baselines.hpp"

namespace qipf {

std::vector<double> DominanceCounts::proportions() const {
    std::vector<double> p(counts.size(), 0.0);
    if (total > 0)
        for (std::size_t i = 0; i < counts.size(); ++i)
            p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return p;
}

DominanceCounts dominance_histogram(const DecompositionTrace& trace) {
    if (trace.rows() == 0)
        throw std::domain_error("dominance_histogram: empty trace");
    DominanceCounts out;
    out.counts.assign(static_cast<std::size_t>(trace.modes), 0);
    out.total = static_cast<long>(trace.rows());
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        int best = 1;
        double best_v = std::fabs(trace.ratio_at(row, 1));
        bool tie = false;
        for (int k = 2; k <= trace.modes; ++k) {
            const double v = std::fabs(trace.ratio_at(row, k));
            if (v > best_v) {
                best = k;
                best_v = v;
                tie = false;
            } else if (v == best_v) {
                tie = true;  // kept: ties break toward the lowest k
            }
        }
        ++out.counts[static_cast<std::size_t>(best - 1)];
        if (tie)
            ++out.ties;
    }
    return out;
}

HeatmapMatrix heatmap_matrix(const DecompositionTrace& trace) {
    if (trace.rows() == 0)
        throw std::domain_error("heatmap_matrix: empty trace");
    HeatmapMatrix hm;
    hm.modes = trace.modes;
    hm.samples = trace.rows();
    hm.values.resize(static_cast<std::size_t>(trace.modes) * trace.rows());
    hm.constant_row.assign(static_cast<std::size_t>(trace.modes), 0);
    for (int k = 1; k <= trace.modes; ++k) {
        double mn = trace.qipf_at(0, k);
        double mx = mn;
        for (std::size_t i = 1; i < trace.rows(); ++i) {
            const double v = trace.qipf_at(i, k);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        double* row = hm.values.data() + static_cast<std::size_t>(k - 1) * hm.samples;
        if (mx > mn) {
            const double inv = 1.0 / (mx - mn);
            for (std::size_t i = 0; i < trace.rows(); ++i)
                row[i] = (trace.qipf_at(i, k) - mn) * inv;
        } else {
            std::fill(row, row + hm.samples, 0.0);
            hm.constant_row[static_cast<std::size_t>(k - 1)] = 1;
        }
    }
    return hm;
}

std::vector<double> eigenvalue_curve(const DecompositionTrace& trace) {
    if (trace.rows() == 0)
        throw std::domain_error("eigenvalue_curve: empty trace");
    std::vector<double> e;
    if (trace.ladder_energy.size() == static_cast<std::size_t>(trace.modes)) {
        e = trace.ladder_energy;
    } else {
        const std::size_t last = trace.rows() - 1;
        e.resize(static_cast<std::size_t>(trace.modes));
        for (int k = 1; k <= trace.modes; ++k)
            e[static_cast<std::size_t>(k - 1)] = trace.eigen_at(last, k);
    }
    double mx = 0.0;
    for (double v : e)
        mx = std::max(mx, v);
    if (!(mx > 0.0))
        throw std::domain_error("eigenvalue_curve: all eigenvalues are zero");
    for (double& v : e)
        v /= mx;
    return e;
}

std::vector<double> mode_activity_average(const DecompositionTrace& trace, int k_lo,
                                          int k_hi) {
    if (k_lo < 1 || k_hi > trace.modes || k_lo > k_hi)
        throw std::domain_error("mode_activity_average: mode range out of bounds");
    std::vector<double> out(trace.rows());
    const double inv = 1.0 / static_cast<double>(k_hi - k_lo + 1);
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        double acc = 0.0;
        for (int k = k_lo; k <= k_hi; ++k)
            acc += std::fabs(trace.ratio_at(row, k));
        out[row] = acc * inv;
    }
    return out;
}

void SensitivityConfig::validate() const {
    if (interval_length < 1)
        throw std::domain_error("SensitivityConfig: interval_length must be >= 1");
    if (noise_db.size() < 2)
        throw std::domain_error("SensitivityConfig: need at least 2 noisy intervals");
    if (runs < 1)
        throw std::domain_error("SensitivityConfig: runs must be >= 1");
    for (const auto& g : state_groups)
        if (g[0] < 1 || g[1] < g[0])
            throw std::domain_error("SensitivityConfig: bad state group");
}

namespace {

// Zero mean, unit population variance; constant input is only centered.
std::vector<double> normalized_copy(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    const double n = static_cast<double>(out.size());
    double mean = 0.0;
    for (double v : out)
        mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : out)
        var += (v - mean) * (v - mean);
    var /= n;
    const double inv_sd = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (double& v : out)
        v = (v - mean) * inv_sd;
    return out;
}

double zeta_from_interval_norms(std::span<const double> norms,
                                std::span<const double> noise_db) {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t r = 0; r + 1 < norms.size(); ++r) {
        const double dd = noise_db[r] - noise_db[r + 1];
        if (dd == 0.0)
            continue;  // division by zero in the definition; pair excluded
        acc += std::fabs((norms[r] - norms[r + 1]) / dd);
        ++used;
    }
    return used > 0 ? acc / static_cast<double>(used) : 0.0;
}

}  // namespace

double sensitivity(std::span<const double> values, const SensitivityConfig& cfg) {
    cfg.validate();
    const std::size_t len = static_cast<std::size_t>(cfg.interval_length);
    const std::size_t region = len * cfg.noise_db.size();
    if (values.size() < region)
        throw std::domain_error("sensitivity: values do not cover the noisy intervals");

    std::vector<double> v;
    if (cfg.normalize_per_framework)
        v = normalized_copy(values);
    else
        v.assign(values.begin(), values.end());

    const std::size_t offset = v.size() - region;
    std::vector<double> norms(cfg.noise_db.size());
    for (std::size_t r = 0; r < cfg.noise_db.size(); ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double x = v[offset + r * len + i];
            acc += x * x;
        }
        norms[r] = std::sqrt(acc);
    }
    return zeta_from_interval_norms(norms, cfg.noise_db);
}

double sensitivity_scalar_intervals(std::span<const double> interval_values,
                                    const SensitivityConfig& cfg) {
    cfg.validate();
    if (interval_values.size() < cfg.noise_db.size())
        throw std::domain_error("sensitivity_scalar_intervals: too few interval values");
    std::vector<double> v;
    if (cfg.normalize_per_framework)
        v = normalized_copy(interval_values);
    else
        v.assign(interval_values.begin(), interval_values.end());
    // The noisy intervals are the trailing ones; the "norm" of a
    // one-value interval is its magnitude.
    std::vector<double> norms(cfg.noise_db.size());
    const std::size_t offset = v.size() - cfg.noise_db.size();
    for (std::size_t r = 0; r < cfg.noise_db.size(); ++r)
        norms[r] = std::fabs(v[offset + r]);
    return zeta_from_interval_norms(norms, cfg.noise_db);
}

SensitivityTable sensitivity_table(const Signal& clean, const NoiseSchedule& schedule,
                                   std::span<const double> kernel_widths,
                                   const SensitivityConfig& cfg,
                                   const SensitivityTableOptions& opts) {
    cfg.validate();
    schedule.validate(clean.size());
    if (kernel_widths.empty())
        throw std::domain_error("sensitivity_table: no kernel widths");
    if (schedule.intervals.size() != cfg.noise_db.size())
        throw std::domain_error("sensitivity_table: schedule/noise_db interval count mismatch");

    SensitivityTable table;
    for (const auto& g : cfg.state_groups)
        table.row_labels.push_back("qipf_states_" + std::to_string(g[0]) + "-" +
                                   std::to_string(g[1]));
    table.row_labels.emplace_back("bayesian_surprise");
    table.row_labels.emplace_back("entropy_difference");
    table.row_labels.emplace_back("classical_ip");
    table.widths.assign(kernel_widths.begin(), kernel_widths.end());
    const std::size_t rows = table.row_labels.size();
    table.cells.assign(rows * table.widths.size(), 0.0);

    for (int run = 0; run < cfg.runs; ++run) {
        // Per-run schedule: fresh noise seed, optionally redrawn dB levels.
        NoiseSchedule sched = schedule;
        sched.rng_seed = schedule.rng_seed * 1000003ULL + static_cast<std::uint64_t>(run);
        SensitivityConfig run_cfg = cfg;
        if (opts.db_range) {
            std::mt19937_64 rng(sched.rng_seed ^ 0x9e3779b97f4a7c15ULL);
            std::uniform_real_distribution<double> draw(opts.db_range->first,
                                                        opts.db_range->second);
            run_cfg.noise_db.resize(sched.intervals.size());
            for (std::size_t r = 0; r < sched.intervals.size(); ++r) {
                run_cfg.noise_db[r] = draw(rng);
                sched.intervals[r].snr_db = run_cfg.noise_db[r];
            }
        } else {
            for (std::size_t r = 0; r < sched.intervals.size(); ++r)
                sched.intervals[r].snr_db = run_cfg.noise_db[r];
        }
        const Signal noisy = add_noise(clean, sched);

        for (std::size_t col = 0; col < table.widths.size(); ++col) {
            KernelConfig kc;
            kc.sigma = table.widths[col];

            EngineConfig ec;
            ec.kernel = kc;
            ec.modes.num_modes = opts.qipf_modes;
            ec.include_current = opts.include_current;
            ec.eigen_scope = opts.eigen_scope;
            const DecompositionTrace trace = decompose_stream(noisy, ec);

            std::size_t row = 0;
            for (const auto& g : cfg.state_groups) {
                const std::vector<double> avg = mode_activity_average(trace, g[0], g[1]);
                table.cells[row * table.widths.size() + col] += sensitivity(avg, run_cfg);
                ++row;
            }

            // Sliding Parzen model of one interval length: a full-history
            // model saturates as 1/i and its surprise output freezes long
            // before the noisy region.
            SurpriseConfig sc;
            sc.kernel = kc;
            sc.grid = make_surprise_grid(clean, kc.sigma, opts.surprise_grid_points);
            sc.window = cfg.interval_length;
            const std::vector<double> surprise = bayesian_surprise(noisy, sc);
            table.cells[row * table.widths.size() + col] += sensitivity(surprise, run_cfg);
            ++row;

            const std::vector<double> ents =
                interval_entropies(noisy, cfg.interval_length, kc);
            table.cells[row * table.widths.size() + col] +=
                sensitivity_scalar_intervals(ents, run_cfg);
            ++row;

            const std::vector<double> ips =
                interval_information_potentials(noisy, cfg.interval_length, kc);
            table.cells[row * table.widths.size() + col] +=
                sensitivity_scalar_intervals(ips, run_cfg);
        }
    }
    const double inv_runs = 1.0 / static_cast<double>(cfg.runs);
    for (double& c : table.cells)
        c *= inv_runs;
    return table;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::domain_error("pearson: sequences must have equal size >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0))
        throw std::domain_error("pearson: zero variance input");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace qipf
