#include "qipf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "qipf/core_kernel.hpp"
#include "qipf/errors.hpp"

namespace qipf {

void EngineConfig::validate() const {
    kernel.validate();
    modes.validate();
    if (window && *window < 2)
        throw std::domain_error("EngineConfig: window must be >= 2");
    if (eigen_scope == EigenScope::window && !window)
        throw std::domain_error("EngineConfig: eigen_scope=window requires a window");
}

ModeState eigen_update(ModeState state, double ratio) {
    if (!std::isfinite(ratio))
        return state;  // skip-and-flag: caller records the event
    if (ratio < state.running_min_ratio)
        state.running_min_ratio = ratio;
    state.any_accepted = true;
    return state;
}

namespace {

struct ModeWork {
    // Shared per-sample Hermite evaluation, normalized per ModeSpec.
    std::vector<double> h;      // H_0..H_{2m}(psi)
    std::vector<double> scale;  // per order
    int m = 0;

    explicit ModeWork(const ModeSpec& spec)
        : h(static_cast<std::size_t>(ModeSpec::hermite_order(spec.num_modes)) + 1),
          scale(h.size(), 1.0),
          m(spec.num_modes) {
        if (spec.normalize) {
            auto c = hermite_normalization(ModeSpec::hermite_order(spec.num_modes));
            scale = std::move(c);
        }
    }

    void eval(double psi) { hermite_sequence_into(psi, h); }

    // Raw ratio numerator/denominator for mode k at the current psi eval.
    // Returns the guarded ratio and sets `hit_guard` when |psi_k| < eps.
    double ratio(const PsiEval& pe, int k, double half_sigma2, double eps,
                 bool* hit_guard) const {
        const int n = ModeSpec::hermite_order(k);
        const double s = scale[static_cast<std::size_t>(n)];
        const double hn = h[static_cast<std::size_t>(n)] * s;
        const double dn = 2.0 * n * h[static_cast<std::size_t>(n - 1)] * s;
        const double d2n = 4.0 * n * (n - 1.0) * h[static_cast<std::size_t>(n - 2)] * s;
        const double lap = d2n * pe.dpsi * pe.dpsi + dn * pe.d2psi;
        double denom = hn;
        *hit_guard = std::fabs(hn) < eps;
        if (*hit_guard)
            denom = (hn < 0.0 ? -eps : eps);
        return half_sigma2 * lap / denom;
    }
};

std::span<const double> past_window(std::span<const double> xs, std::size_t i_1based,
                                    const EngineConfig& cfg) {
    // Usable indices at step i: [i-W+1, i-1] exclusive of current,
    // [i-W+1, i] inclusive, all 1-based; W absent means everything.
    std::size_t hi = cfg.include_current ? i_1based : i_1based - 1;
    std::size_t lo = 1;
    if (cfg.window) {
        const std::size_t w = static_cast<std::size_t>(*cfg.window);
        if (i_1based > w)
            lo = i_1based - w + 1;
    }
    return xs.subspan(lo - 1, hi - lo + 1);
}

void run_parallel(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(hw == 0 ? 1 : hw, 8);
    if (workers <= 1 || n < 64) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        threads.emplace_back([&body, &errors, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace

DecompositionTrace decompose_stream_at(std::span<const double> eval_points,
                                       const Signal& signal, const EngineConfig& cfg) {
    cfg.validate();
    validate_signal(signal);
    if (signal.size() < 2)
        throw std::domain_error("decompose_stream: signal must have at least 2 samples");
    if (eval_points.size() != signal.size())
        throw std::domain_error("decompose_stream_at: eval_points/signal length mismatch");
    for (double p : eval_points)
        if (!std::isfinite(p))
            throw std::domain_error("decompose_stream_at: non-finite evaluation point");

    const std::span<const double> xs = signal.view();
    const std::size_t n = xs.size();
    const int m = cfg.modes.num_modes;
    const std::size_t rows = n - 1;
    const double half_sigma2 = 0.5 * cfg.kernel.sigma * cfg.kernel.sigma;

    DecompositionTrace tr;
    tr.modes = m;
    tr.index.reserve(rows);
    tr.x.reserve(rows);
    tr.psi.reserve(rows);
    tr.ipf.reserve(rows);
    tr.fundamental_ratio.reserve(rows);
    tr.fundamental_eigen.reserve(rows);
    tr.ratio.reserve(rows * static_cast<std::size_t>(m));
    tr.eigen.reserve(rows * static_cast<std::size_t>(m));
    tr.qipf.reserve(rows * static_cast<std::size_t>(m));
    tr.flagged.reserve(rows * static_cast<std::size_t>(m));

    ModeWork work(cfg.modes);
    std::vector<ModeState> states(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k)
        states[static_cast<std::size_t>(k - 1)].k = k;
    ModeState fundamental;
    tr.ladder_energy.assign(static_cast<std::size_t>(m), 0.0);

    for (std::size_t i = 2; i <= n; ++i) {
        const double x = eval_points[i - 1];
        const auto past = past_window(xs, i, cfg);
        const auto sums = detail::kernel_sums(x, past, cfg.kernel.sigma);
        if (!(sums.s0 > 0.0))
            throw NumericError(static_cast<long>(i), 0,
                               "wave-function underflow: every window sample is too far "
                               "from the evaluation point");
        const PsiEval pe = detail::psi_from_sums(x, sums);

        tr.index.push_back(static_cast<long>(i));
        tr.x.push_back(x);
        tr.psi.push_back(pe.psi);
        tr.ipf.push_back(sums.s0);

        const double r0 = half_sigma2 * pe.d2psi / pe.psi;
        fundamental = eigen_update(fundamental, r0);
        tr.fundamental_ratio.push_back(r0);
        tr.fundamental_eigen.push_back(fundamental.eigenvalue());

        work.eval(pe.psi);
        const std::size_t row = tr.index.size() - 1;
        const double grad2 = pe.dpsi * pe.dpsi;
        for (int k = 1; k <= m; ++k) {
            const double ladder =
                half_sigma2 * ((2.0 * ModeSpec::hermite_order(k) + 1.0) - pe.psi * pe.psi) *
                grad2;
            double& lad = tr.ladder_energy[static_cast<std::size_t>(k - 1)];
            lad = std::max(lad, ladder);
            bool guard = false;
            const double r = work.ratio(pe, k, half_sigma2, cfg.kernel.epsilon, &guard);
            const bool bad = guard || !std::isfinite(r);
            ModeState& st = states[static_cast<std::size_t>(k - 1)];
            if (!bad)
                st = eigen_update(st, r);

            double e;
            if (cfg.eigen_scope == EigenScope::history) {
                e = st.eigenvalue();
            } else {
                // Sliding min over trailing rows whose sample index is in
                // (i - W, i]. Flagged rows stay excluded.
                const std::size_t w = static_cast<std::size_t>(*cfg.window);
                double mn = std::numeric_limits<double>::infinity();
                bool seen = false;
                std::size_t r_lo = (row + 1 > w) ? row + 1 - w : 0;
                for (std::size_t q = r_lo; q <= row; ++q) {
                    const std::size_t c = tr.cell(q, k);
                    const double rq = (q == row) ? r : tr.ratio[c];
                    const bool fq = (q == row) ? bad : (tr.flagged[c] != 0);
                    if (!fq && std::isfinite(rq)) {
                        mn = std::min(mn, rq);
                        seen = true;
                    }
                }
                e = seen ? -mn : 0.0;
            }

            tr.ratio.push_back(r);
            tr.eigen.push_back(e);
            tr.qipf.push_back(e + r);
            tr.flagged.push_back(bad ? 1 : 0);
            if (bad)
                ++tr.flagged_count;
        }
    }
    return tr;
}

DecompositionTrace decompose_stream(const Signal& signal, const EngineConfig& cfg) {
    return decompose_stream_at(signal.view(), signal, cfg);
}

SpatialResult spatial_qipf(std::span<const double> grid, const Signal& samples,
                           const EngineConfig& cfg) {
    cfg.validate();
    validate_signal(samples);
    if (grid.empty())
        throw std::domain_error("spatial_qipf: empty grid");
    if (samples.size() < 2)
        throw std::domain_error("spatial_qipf: need at least 2 samples");
    for (double g : grid)
        if (!std::isfinite(g))
            throw std::domain_error("spatial_qipf: non-finite grid point");

    const int m = cfg.modes.num_modes;
    const std::size_t ng = grid.size();
    const double half_sigma2 = 0.5 * cfg.kernel.sigma * cfg.kernel.sigma;

    SpatialResult res;
    res.modes = m;
    res.grid.assign(grid.begin(), grid.end());
    res.psi.resize(ng);
    res.ipf.resize(ng);
    res.fundamental_ratio.resize(ng);
    res.ratio.resize(ng * static_cast<std::size_t>(m));
    res.qipf.resize(ng * static_cast<std::size_t>(m));
    res.flagged.assign(ng * static_cast<std::size_t>(m), 0);

    // Grid points are independent; evaluate in parallel, then reduce the
    // grid-wide minima in index order so results stay deterministic.
    run_parallel(ng, [&](std::size_t lo, std::size_t hi) {
        ModeWork work(cfg.modes);
        for (std::size_t g = lo; g < hi; ++g) {
            const double x = res.grid[g];
            const auto sums = detail::kernel_sums(x, samples.view(), cfg.kernel.sigma);
            if (!(sums.s0 > 0.0))
                throw NumericError(static_cast<long>(g), 0,
                                   "wave-function underflow at grid point");
            const PsiEval pe = detail::psi_from_sums(x, sums);
            res.psi[g] = pe.psi;
            res.ipf[g] = sums.s0;
            res.fundamental_ratio[g] = half_sigma2 * pe.d2psi / pe.psi;
            work.eval(pe.psi);
            for (int k = 1; k <= m; ++k) {
                bool guard = false;
                const double r = work.ratio(pe, k, half_sigma2, cfg.kernel.epsilon, &guard);
                const std::size_t c = res.cell(g, k);
                res.ratio[c] = r;
                if (guard || !std::isfinite(r))
                    res.flagged[c] = 1;
            }
        }
    });

    res.eigenvalue.resize(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        ModeState st;
        st.k = k;
        for (std::size_t g = 0; g < ng; ++g)
            if (!res.flagged[res.cell(g, k)])
                st = eigen_update(st, res.ratio[res.cell(g, k)]);
        res.eigenvalue[static_cast<std::size_t>(k - 1)] = st.eigenvalue();
        for (std::size_t g = 0; g < ng; ++g)
            res.qipf[res.cell(g, k)] = st.eigenvalue() + res.ratio[res.cell(g, k)];
    }

    ModeState fundamental;
    for (std::size_t g = 0; g < ng; ++g)
        fundamental = eigen_update(fundamental, res.fundamental_ratio[g]);
    res.fundamental_eigen = fundamental.eigenvalue();
    return res;
}

std::vector<double> mode_average(const DecompositionTrace& trace, int k_lo, int k_hi) {
    if (k_lo < 1 || k_hi > trace.modes || k_lo > k_hi)
        throw std::domain_error("mode_average: mode range out of bounds");
    std::vector<double> out(trace.rows());
    const double inv = 1.0 / static_cast<double>(k_hi - k_lo + 1);
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        double acc = 0.0;
        for (int k = k_lo; k <= k_hi; ++k)
            acc += trace.qipf_at(row, k);
        out[row] = acc * inv;
    }
    return out;
}

}  // namespace qipf
