#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qipf/analysis.hpp"
#include "qipf/baselines.hpp"
#include "qipf/engine.hpp"
#include "qipf/errors.hpp"
#include "qipf/experiments.hpp"
#include "qipf/io.hpp"
#include "qipf/signals.hpp"

namespace {

using namespace qipf;

struct CommonEngineFlags {
    double sigma = 0.5;
    double epsilon = 1e-8;
    int modes = 6;
    int window = 0;  // 0 = unwindowed
    std::string eigen_scope = "history";
    bool include_current = false;
    bool no_hermite_normalize = false;

    EngineConfig to_engine_config() const {
        EngineConfig ec;
        ec.kernel.sigma = sigma;
        ec.kernel.epsilon = epsilon;
        ec.modes.num_modes = modes;
        ec.modes.normalize = !no_hermite_normalize;
        if (window > 0)
            ec.window = window;
        ec.eigen_scope = eigen_scope == "window" ? EigenScope::window : EigenScope::history;
        ec.include_current = include_current;
        return ec;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--sigma", sigma, "Gaussian kernel width")->required();
        cmd->add_option("--epsilon", epsilon, "division guard");
        cmd->add_option("--modes", modes, "number of even-order QIPF modes");
        cmd->add_option("--window", window, "trailing sample window (0 = all past)");
        cmd->add_option("--eigen-scope", eigen_scope, "history | window")
            ->check(CLI::IsMember({"history", "window"}));
        cmd->add_flag("--include-current", include_current,
                      "include the current sample in its own kernel sum");
        cmd->add_flag("--no-hermite-normalize", no_hermite_normalize,
                      "use unnormalized Hermite polynomials");
    }
};

Signal load_signal(const std::string& path, const std::string& format, bool do_normalize) {
    Signal s = format == "raw" ? read_signal_raw(path) : read_signal_csv(path);
    if (do_normalize)
        s = normalize(s);
    return s;
}

void write_generated(const Signal& s, const std::string& out, const std::string& format) {
    if (format == "raw")
        write_signal_raw(out, s);
    else
        write_signal_csv(out, s);
    std::cout << "wrote " << s.size() << " samples to " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming quantum decomposition of the information potential field"};
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------
    std::string config_path, out_override;
    bool run_plots = false;
    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("config", config_path, "JSON config or manifest")->required();
    run_cmd->add_option("--out", out_override, "output directory (overrides config)");
    run_cmd->add_flag("--plots", run_plots, "also emit SVG plots");

    // ---- generate -----------------------------------------------------
    auto* gen_cmd = app.add_subcommand("generate", "generate a test signal");
    gen_cmd->require_subcommand(1);
    std::string gen_out = "signal.csv", gen_format = "csv";
    bool gen_normalize = false;

    LorenzParams lor;
    long lor_n = 500;
    std::string lor_component = "x";
    auto* lorenz_cmd = gen_cmd->add_subcommand("lorenz", "Lorenz system component (RK4)");
    lorenz_cmd->add_option("--n", lor_n, "number of samples");
    lorenz_cmd->add_option("--sigma", lor.sigma, "Lorenz sigma");
    lorenz_cmd->add_option("--rho", lor.rho, "Lorenz rho");
    lorenz_cmd->add_option("--beta", lor.beta, "Lorenz beta");
    lorenz_cmd->add_option("--dt", lor.dt, "integration step");
    lorenz_cmd->add_option("--x0", lor.x0, "initial x");
    lorenz_cmd->add_option("--y0", lor.y0, "initial y");
    lorenz_cmd->add_option("--z0", lor.z0, "initial z");
    lorenz_cmd->add_option("--component", lor_component, "x | y | z")
        ->check(CLI::IsMember({"x", "y", "z"}));

    MackeyGlassParams mg;
    long mg_n = 5000;
    auto* mg_cmd = gen_cmd->add_subcommand("mackey-glass", "Mackey-Glass delay series");
    mg_cmd->add_option("--n", mg_n, "number of samples");
    mg_cmd->add_option("--tau", mg.tau, "delay");
    mg_cmd->add_option("--alpha", mg.alpha, "alpha");
    mg_cmd->add_option("--beta", mg.beta, "beta");
    mg_cmd->add_option("--n-exp", mg.n_exp, "nonlinearity exponent");
    mg_cmd->add_option("--dt", mg.dt, "integration step");
    mg_cmd->add_option("--history-init", mg.history_init, "constant pre-history value");

    double sine_f0 = 100.0, sine_fs = 8000.0, sine_dur = 0.16;
    auto* sine_cmd = gen_cmd->add_subcommand("sine", "single sine wave");
    sine_cmd->add_option("--f0", sine_f0, "frequency (Hz)");
    sine_cmd->add_option("--fs", sine_fs, "sample rate (Hz)");
    sine_cmd->add_option("--dur", sine_dur, "duration (s)");

    std::vector<double> mix_freqs;
    double mix_fs = 8000.0, mix_dur = 0.16;
    auto* mix_cmd = gen_cmd->add_subcommand("mixture", "unweighted sum of sines");
    mix_cmd->add_option("--freqs", mix_freqs, "component frequencies (Hz)")->required();
    mix_cmd->add_option("--fs", mix_fs, "sample rate (Hz)");
    mix_cmd->add_option("--dur", mix_dur, "duration (s)");

    for (auto* cmd : {lorenz_cmd, mg_cmd, sine_cmd, mix_cmd}) {
        cmd->add_option("--out", gen_out, "output file");
        cmd->add_option("--format", gen_format, "csv | raw")
            ->check(CLI::IsMember({"csv", "raw"}));
        cmd->add_flag("--normalize", gen_normalize, "zero mean, unit variance");
    }

    // ---- decompose ----------------------------------------------------
    std::string dec_input, dec_format = "csv", dec_out = "trace.csv";
    bool dec_normalize = false;
    CommonEngineFlags dec_flags;
    auto* dec_cmd = app.add_subcommand("decompose", "streaming QIPF decomposition to CSV");
    dec_cmd->add_option("--input", dec_input, "signal file")->required();
    dec_cmd->add_option("--format", dec_format, "csv | raw")
        ->check(CLI::IsMember({"csv", "raw"}));
    dec_cmd->add_flag("--normalize", dec_normalize, "normalize the signal first");
    dec_cmd->add_option("--out", dec_out, "trace CSV path");
    dec_flags.attach(dec_cmd);

    // ---- spatial ------------------------------------------------------
    std::string spa_input, spa_format = "csv", spa_out = "spatial.csv";
    bool spa_normalize = false;
    double spa_lo = 0.0, spa_hi = 0.0;
    int spa_points = 400;
    bool spa_have_range = false;
    CommonEngineFlags spa_flags;
    auto* spa_cmd = app.add_subcommand("spatial", "grid evaluation of QIPF modes");
    spa_cmd->add_option("--input", spa_input, "signal file")->required();
    spa_cmd->add_option("--format", spa_format, "csv | raw")
        ->check(CLI::IsMember({"csv", "raw"}));
    spa_cmd->add_flag("--normalize", spa_normalize, "normalize the signal first");
    spa_cmd->add_option("--grid-points", spa_points, "grid size");
    auto* lo_opt = spa_cmd->add_option("--grid-lo", spa_lo, "grid lower bound");
    auto* hi_opt = spa_cmd->add_option("--grid-hi", spa_hi, "grid upper bound");
    spa_cmd->add_option("--out", spa_out, "output CSV path");
    spa_flags.attach(spa_cmd);
    spa_cmd->callback([&] { spa_have_range = lo_opt->count() > 0 && hi_opt->count() > 0; });

    // ---- compare ------------------------------------------------------
    std::string cmp_input, cmp_format = "csv", cmp_out = "compare.csv";
    bool cmp_normalize = false;
    double cmp_scale = 0.5;
    CommonEngineFlags cmp_flags;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "causal classical IPF vs QIPF mode average at the unscaled sample points");
    cmp_cmd->add_option("--input", cmp_input, "signal file")->required();
    cmp_cmd->add_option("--format", cmp_format, "csv | raw")
        ->check(CLI::IsMember({"csv", "raw"}));
    cmp_cmd->add_flag("--normalize", cmp_normalize, "normalize the signal first");
    cmp_cmd->add_option("--scale", cmp_scale, "stream amplitude scale factor");
    cmp_cmd->add_option("--out", cmp_out, "output CSV path");
    cmp_flags.attach(cmp_cmd);

    // ---- report -------------------------------------------------------
    std::string rep_trace, rep_kind = "dominance", rep_out = "report.csv";
    auto* rep_cmd = app.add_subcommand("report", "derive a report from a trace CSV");
    rep_cmd->add_option("--trace", rep_trace, "trace CSV from decompose")->required();
    rep_cmd->add_option("--kind", rep_kind, "dominance | eigencurve | heatmap")
        ->check(CLI::IsMember({"dominance", "eigencurve", "heatmap"}));
    rep_cmd->add_option("--out", rep_out, "output path (CSV, or PGM for heatmap)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const ExperimentConfig cfg = load_config(config_path);
            ExperimentConfig effective = cfg;
            if (run_plots)
                effective.plots = true;
            const auto outdir = resolve_output_dir(effective, out_override);
            const auto files = run_experiment(effective, outdir);
            std::cout << "wrote " << files.size() << " artifacts to " << outdir.string()
                      << "\n";
            return 0;
        }
        if (*gen_cmd) {
            Signal s;
            if (*lorenz_cmd) {
                lor.n_samples = static_cast<std::size_t>(lor_n);
                lor.component = lor_component == "y"   ? LorenzComponent::y
                                : lor_component == "z" ? LorenzComponent::z
                                                       : LorenzComponent::x;
                s = gen_lorenz(lor);
            } else if (*mg_cmd) {
                mg.n_samples = static_cast<std::size_t>(mg_n);
                s = gen_mackey_glass(mg);
            } else if (*sine_cmd) {
                s = gen_sine(sine_f0, sine_fs, sine_dur);
            } else {
                s = gen_sine_mixture(mix_freqs, mix_fs, mix_dur);
            }
            if (gen_normalize)
                s = normalize(s);
            write_generated(s, gen_out, gen_format);
            return 0;
        }
        if (*dec_cmd) {
            const Signal s = load_signal(dec_input, dec_format, dec_normalize);
            const DecompositionTrace tr = decompose_stream(s, dec_flags.to_engine_config());
            write_trace_csv(dec_out, tr);
            std::cout << "wrote " << tr.rows() << " trace rows to " << dec_out << "\n";
            return 0;
        }
        if (*spa_cmd) {
            const Signal s = load_signal(spa_input, spa_format, spa_normalize);
            const EngineConfig ec = spa_flags.to_engine_config();
            double lo = spa_lo, hi = spa_hi;
            if (!spa_have_range) {
                const auto [mn, mx] =
                    std::minmax_element(s.samples.begin(), s.samples.end());
                lo = *mn - 2.0 * ec.kernel.sigma;
                hi = *mx + 2.0 * ec.kernel.sigma;
            }
            if (!(lo < hi))
                throw ConfigError("grid", "grid-lo must be below grid-hi");
            std::vector<double> grid(static_cast<std::size_t>(spa_points));
            for (int i = 0; i < spa_points; ++i)
                grid[static_cast<std::size_t>(i)] =
                    lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(spa_points - 1);
            const SpatialResult res = spatial_qipf(grid, s, ec);
            std::vector<std::string> names = {"x", "psi", "ipf"};
            std::vector<std::vector<double>> mode_cols(
                static_cast<std::size_t>(res.modes));
            std::vector<std::span<const double>> cols = {res.grid, res.psi, res.ipf};
            for (int k = 1; k <= res.modes; ++k) {
                auto& col = mode_cols[static_cast<std::size_t>(k - 1)];
                col.resize(res.grid.size());
                for (std::size_t g = 0; g < res.grid.size(); ++g)
                    col[g] = res.qipf[res.cell(g, k)];
                names.push_back("qipf_" + std::to_string(k));
                cols.emplace_back(col);
            }
            write_columns_csv(spa_out, names, cols);
            std::cout << "wrote " << res.grid.size() << " grid rows to " << spa_out << "\n";
            return 0;
        }
        if (*cmp_cmd) {
            Signal eval_signal = load_signal(cmp_input, cmp_format, cmp_normalize);
            const Signal stream =
                cmp_scale != 1.0 ? scale(eval_signal, cmp_scale) : eval_signal;
            const EngineConfig ec = cmp_flags.to_engine_config();
            const DecompositionTrace tr =
                decompose_stream_at(eval_signal.view(), stream, ec);
            const std::vector<double> avg = mode_average(tr, 1, ec.modes.num_modes);
            std::vector<double> idx(tr.rows());
            for (std::size_t i = 0; i < tr.rows(); ++i)
                idx[i] = static_cast<double>(tr.index[i]);
            write_columns_csv(cmp_out, {"index", "x", "classical_ipf", "qipf_avg"},
                              {idx, tr.x, tr.ipf, avg});
            std::cout << "wrote " << tr.rows() << " rows to " << cmp_out << "\n";
            return 0;
        }
        if (*rep_cmd) {
            const DecompositionTrace tr = read_trace_csv(rep_trace);
            if (rep_kind == "dominance") {
                const DominanceCounts dom = dominance_histogram(tr);
                const std::vector<double> prop = dom.proportions();
                std::vector<double> mode_ids(static_cast<std::size_t>(tr.modes)),
                    counts(static_cast<std::size_t>(tr.modes));
                for (int k = 1; k <= tr.modes; ++k) {
                    mode_ids[static_cast<std::size_t>(k - 1)] = k;
                    counts[static_cast<std::size_t>(k - 1)] = static_cast<double>(
                        dom.counts[static_cast<std::size_t>(k - 1)]);
                }
                write_columns_csv(rep_out, {"mode", "count", "proportion"},
                                  {mode_ids, counts, prop});
            } else if (rep_kind == "eigencurve") {
                const std::vector<double> curve = eigenvalue_curve(tr);
                std::vector<double> mode_ids(curve.size()), raw(curve.size());
                for (int k = 1; k <= tr.modes; ++k) {
                    mode_ids[static_cast<std::size_t>(k - 1)] = k;
                    raw[static_cast<std::size_t>(k - 1)] =
                        tr.eigen_at(tr.rows() - 1, k);
                }
                write_columns_csv(rep_out, {"mode", "eigenvalue", "normalized"},
                                  {mode_ids, raw, curve});
            } else {
                write_heatmap_pgm(rep_out, heatmap_matrix(tr));
            }
            std::cout << "wrote " << rep_out << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
