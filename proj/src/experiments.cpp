#include "qipf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "qipf/baselines.hpp"
#include "qipf/errors.hpp"
#include "qipf/io.hpp"

namespace qipf {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw ConfigError(path, why);
}

const json& need(const json& j, const char* key, const std::string& prefix) {
    auto it = j.find(key);
    if (it == j.end())
        bad_field(prefix + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number())
        bad_field(path, "expected a number");
    return j.get<double>();
}

double get_number(const json& j, const char* key, const std::string& prefix, double def) {
    auto it = j.find(key);
    return it == j.end() ? def : as_number(*it, prefix + key);
}

long get_integer(const json& j, const char* key, const std::string& prefix, long def) {
    auto it = j.find(key);
    if (it == j.end())
        return def;
    if (!it->is_number_integer())
        bad_field(prefix + key, "expected an integer");
    return it->get<long>();
}

bool get_bool(const json& j, const char* key, const std::string& prefix, bool def) {
    auto it = j.find(key);
    if (it == j.end())
        return def;
    if (!it->is_boolean())
        bad_field(prefix + key, "expected a boolean");
    return it->get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& prefix,
                       const std::string& def) {
    auto it = j.find(key);
    if (it == j.end())
        return def;
    if (!it->is_string())
        bad_field(prefix + key, "expected a string");
    return it->get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& path) {
    if (!j.is_array())
        bad_field(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j)
        out.push_back(as_number(v, path));
    return out;
}

SignalSpec parse_signal(const json& j) {
    if (!j.is_object())
        bad_field("signal", "expected an object");
    SignalSpec s;
    s.kind = get_string(j, "kind", "signal.", "");
    if (s.kind.empty())
        bad_field("signal.kind", "missing required field");
    s.normalize = get_bool(j, "normalize", "signal.", true);
    s.scale = get_number(j, "scale", "signal.", 1.0);
    if (s.kind == "lorenz") {
        s.lorenz.sigma = get_number(j, "sigma", "signal.", s.lorenz.sigma);
        s.lorenz.rho = get_number(j, "rho", "signal.", s.lorenz.rho);
        s.lorenz.beta = get_number(j, "beta", "signal.", s.lorenz.beta);
        s.lorenz.dt = get_number(j, "dt", "signal.", s.lorenz.dt);
        s.lorenz.n_samples = static_cast<std::size_t>(
            get_integer(j, "n", "signal.", static_cast<long>(s.lorenz.n_samples)));
        if (auto it = j.find("init"); it != j.end()) {
            const auto init = get_number_list(*it, "signal.init");
            if (init.size() != 3)
                bad_field("signal.init", "expected [x0, y0, z0]");
            s.lorenz.x0 = init[0];
            s.lorenz.y0 = init[1];
            s.lorenz.z0 = init[2];
        }
        const std::string comp = get_string(j, "component", "signal.", "x");
        if (comp == "x")
            s.lorenz.component = LorenzComponent::x;
        else if (comp == "y")
            s.lorenz.component = LorenzComponent::y;
        else if (comp == "z")
            s.lorenz.component = LorenzComponent::z;
        else
            bad_field("signal.component", "expected x, y or z");
    } else if (s.kind == "mackey_glass") {
        s.mackey_glass.alpha = get_number(j, "alpha", "signal.", s.mackey_glass.alpha);
        s.mackey_glass.beta = get_number(j, "beta", "signal.", s.mackey_glass.beta);
        s.mackey_glass.tau = get_number(j, "tau", "signal.", s.mackey_glass.tau);
        s.mackey_glass.n_exp = get_number(j, "n_exp", "signal.", s.mackey_glass.n_exp);
        s.mackey_glass.dt = get_number(j, "dt", "signal.", s.mackey_glass.dt);
        s.mackey_glass.history_init =
            get_number(j, "history_init", "signal.", s.mackey_glass.history_init);
        s.mackey_glass.n_samples = static_cast<std::size_t>(
            get_integer(j, "n", "signal.", static_cast<long>(s.mackey_glass.n_samples)));
    } else if (s.kind == "sine") {
        s.f0 = get_number(j, "f0", "signal.", s.f0);
        s.fs = get_number(j, "fs", "signal.", s.fs);
        s.duration = get_number(j, "duration", "signal.", s.duration);
    } else if (s.kind == "sine_mixture") {
        s.freqs = get_number_list(need(j, "freqs", "signal."), "signal.freqs");
        s.fs = get_number(j, "fs", "signal.", s.fs);
        s.duration = get_number(j, "duration", "signal.", s.duration);
    } else if (s.kind == "file") {
        s.path = get_string(j, "path", "signal.", "");
        if (s.path.empty())
            bad_field("signal.path", "missing required field");
        s.format = get_string(j, "format", "signal.", "csv");
        if (s.format != "csv" && s.format != "raw")
            bad_field("signal.format", "expected csv or raw");
    } else {
        bad_field("signal.kind",
                  "expected lorenz, mackey_glass, sine, sine_mixture or file");
    }
    return s;
}

std::vector<NoiseInterval> parse_noise(const json& j) {
    if (!j.is_object())
        bad_field("noise", "expected an object");
    const json& arr = need(j, "intervals", "noise.");
    if (!arr.is_array() || arr.empty())
        bad_field("noise.intervals", "expected a non-empty array");
    std::vector<NoiseInterval> out;
    std::size_t idx = 0;
    for (const auto& iv : arr) {
        const std::string p = "noise.intervals[" + std::to_string(idx) + "].";
        NoiseInterval ni;
        const long start = get_integer(iv, "start", p, -1);
        const long end = get_integer(iv, "end", p, -1);
        if (start < 0)
            bad_field(p + "start", "missing or negative");
        if (end <= start)
            bad_field(p + "end", "must be greater than start");
        ni.start = static_cast<std::size_t>(start);
        ni.end = static_cast<std::size_t>(end);
        if (auto it = iv.find("snr_db"); it != iv.end())
            ni.snr_db = as_number(*it, p + "snr_db");
        else
            ni.snr_db = std::numeric_limits<double>::quiet_NaN();  // redrawn per run
        out.push_back(ni);
        ++idx;
    }
    return out;
}

std::vector<std::array<int, 2>> parse_groups(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        bad_field(path, "expected a non-empty array of [lo, hi] pairs");
    std::vector<std::array<int, 2>> out;
    for (const auto& g : j) {
        if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() ||
            !g[1].is_number_integer())
            bad_field(path, "each group must be an [lo, hi] integer pair");
        out.push_back({g[0].get<int>(), g[1].get<int>()});
    }
    return out;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    json sig;
    sig["kind"] = c.signal.kind;
    sig["normalize"] = c.signal.normalize;
    sig["scale"] = c.signal.scale;
    if (c.signal.kind == "lorenz") {
        sig["sigma"] = c.signal.lorenz.sigma;
        sig["rho"] = c.signal.lorenz.rho;
        sig["beta"] = c.signal.lorenz.beta;
        sig["dt"] = c.signal.lorenz.dt;
        sig["n"] = c.signal.lorenz.n_samples;
        sig["init"] = {c.signal.lorenz.x0, c.signal.lorenz.y0, c.signal.lorenz.z0};
        sig["component"] = c.signal.lorenz.component == LorenzComponent::x   ? "x"
                           : c.signal.lorenz.component == LorenzComponent::y ? "y"
                                                                             : "z";
    } else if (c.signal.kind == "mackey_glass") {
        sig["alpha"] = c.signal.mackey_glass.alpha;
        sig["beta"] = c.signal.mackey_glass.beta;
        sig["tau"] = c.signal.mackey_glass.tau;
        sig["n_exp"] = c.signal.mackey_glass.n_exp;
        sig["dt"] = c.signal.mackey_glass.dt;
        sig["history_init"] = c.signal.mackey_glass.history_init;
        sig["n"] = c.signal.mackey_glass.n_samples;
    } else if (c.signal.kind == "sine") {
        sig["f0"] = c.signal.f0;
        sig["fs"] = c.signal.fs;
        sig["duration"] = c.signal.duration;
    } else if (c.signal.kind == "sine_mixture") {
        sig["freqs"] = c.signal.freqs;
        sig["fs"] = c.signal.fs;
        sig["duration"] = c.signal.duration;
    } else {
        sig["path"] = c.signal.path;
        sig["format"] = c.signal.format;
    }
    j["signal"] = sig;
    j["kernel"] = {{"sigma", c.kernel.sigma},
                   {"epsilon", c.kernel.epsilon},
                   {"fd_step", c.kernel.fd_step}};
    if (!c.kernel_widths.empty())
        j["kernel_widths"] = c.kernel_widths;
    j["modes"] = c.modes;
    j["hermite_normalize"] = c.hermite_normalize;
    if (c.window)
        j["window"] = *c.window;
    j["eigen_scope"] = c.eigen_scope == EigenScope::history ? "history" : "window";
    j["include_current"] = c.include_current;
    if (c.noise_intervals) {
        json arr = json::array();
        for (const auto& iv : *c.noise_intervals) {
            json e;
            e["start"] = iv.start;
            e["end"] = iv.end;
            if (!std::isnan(iv.snr_db))
                e["snr_db"] = iv.snr_db;
            arr.push_back(e);
        }
        j["noise"] = {{"intervals", arr}};
    }
    {
        json s;
        s["interval_length"] = c.sensitivity.interval_length;
        json groups = json::array();
        for (const auto& g : c.sensitivity.state_groups)
            groups.push_back({g[0], g[1]});
        s["state_groups"] = groups;
        s["runs"] = c.sensitivity.runs;
        s["normalize_per_framework"] = c.sensitivity.normalize_per_framework;
        if (c.sensitivity.db_range)
            s["db_range"] = {c.sensitivity.db_range->first, c.sensitivity.db_range->second};
        j["sensitivity"] = s;
    }
    {
        json g;
        g["points"] = c.grid.points;
        if (c.grid.lo)
            g["lo"] = *c.grid.lo;
        if (c.grid.hi)
            g["hi"] = *c.grid.hi;
        j["grid"] = g;
    }
    j["compare_modes"] = c.compare_modes;
    {
        json groups = json::array();
        for (const auto& g : c.groups)
            groups.push_back({g[0], g[1]});
        j["groups"] = groups;
    }
    j["seed"] = c.seed;
    if (!c.seeds.empty())
        j["seeds"] = c.seeds;
    if (!c.output_dir.empty())
        j["output_dir"] = c.output_dir;
    j["plots"] = c.plots;
    return j;
}

ExperimentConfig parse_config(const json& root) {
    const json& j = (root.contains("config") && root.contains("version")) ? root["config"]
                                                                          : root;
    if (!j.is_object())
        bad_field("(root)", "expected a JSON object");
    ExperimentConfig c;
    c.experiment = get_string(j, "experiment", "", "");
    static const char* kinds[] = {"spatial",    "causal_compare", "dominance",
                                  "eigencurve", "heatmap",        "sensitivity"};
    if (std::find(std::begin(kinds), std::end(kinds), c.experiment) == std::end(kinds))
        bad_field("experiment",
                  "expected spatial, causal_compare, dominance, eigencurve, heatmap or "
                  "sensitivity");
    c.signal = parse_signal(need(j, "signal", ""));
    if (auto it = j.find("kernel"); it != j.end()) {
        c.kernel.sigma = get_number(*it, "sigma", "kernel.", c.kernel.sigma);
        c.kernel.epsilon = get_number(*it, "epsilon", "kernel.", c.kernel.epsilon);
        c.kernel.fd_step = get_number(*it, "fd_step", "kernel.", c.kernel.fd_step);
    }
    if (!(c.kernel.sigma > 0.0) || !std::isfinite(c.kernel.sigma))
        bad_field("kernel.sigma", "must be positive");
    if (!(c.kernel.epsilon > 0.0))
        bad_field("kernel.epsilon", "must be positive");
    if (!(c.kernel.fd_step > 0.0))
        bad_field("kernel.fd_step", "must be positive");
    if (auto it = j.find("kernel_widths"); it != j.end()) {
        c.kernel_widths = get_number_list(*it, "kernel_widths");
        for (double w : c.kernel_widths)
            if (!(w > 0.0))
                bad_field("kernel_widths", "widths must be positive");
    }
    c.modes = static_cast<int>(get_integer(j, "modes", "", c.modes));
    if (c.modes < 1)
        bad_field("modes", "must be >= 1");
    c.hermite_normalize = get_bool(j, "hermite_normalize", "", true);
    if (auto it = j.find("window"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long>() < 2)
            bad_field("window", "must be an integer >= 2");
        c.window = it->get<int>();
    }
    const std::string scope = get_string(j, "eigen_scope", "", "history");
    if (scope == "history")
        c.eigen_scope = EigenScope::history;
    else if (scope == "window")
        c.eigen_scope = EigenScope::window;
    else
        bad_field("eigen_scope", "expected history or window");
    if (c.eigen_scope == EigenScope::window && !c.window)
        bad_field("eigen_scope", "window scope requires a window");
    c.include_current = get_bool(j, "include_current", "", false);
    if (auto it = j.find("noise"); it != j.end() && !it->is_null())
        c.noise_intervals = parse_noise(*it);
    if (auto it = j.find("sensitivity"); it != j.end()) {
        const json& s = *it;
        c.sensitivity.interval_length = static_cast<int>(
            get_integer(s, "interval_length", "sensitivity.", c.sensitivity.interval_length));
        if (c.sensitivity.interval_length < 1)
            bad_field("sensitivity.interval_length", "must be >= 1");
        if (auto g = s.find("state_groups"); g != s.end())
            c.sensitivity.state_groups = parse_groups(*g, "sensitivity.state_groups");
        c.sensitivity.runs =
            static_cast<int>(get_integer(s, "runs", "sensitivity.", c.sensitivity.runs));
        if (c.sensitivity.runs < 1)
            bad_field("sensitivity.runs", "must be >= 1");
        c.sensitivity.normalize_per_framework =
            get_bool(s, "normalize_per_framework", "sensitivity.", true);
        if (auto r = s.find("db_range"); r != s.end() && !r->is_null()) {
            const auto range = get_number_list(*r, "sensitivity.db_range");
            if (range.size() != 2 || !(range[0] < range[1]))
                bad_field("sensitivity.db_range", "expected [lo, hi] with lo < hi");
            c.sensitivity.db_range = {range[0], range[1]};
        }
    }
    if (auto it = j.find("grid"); it != j.end()) {
        c.grid.points = static_cast<int>(get_integer(*it, "points", "grid.", c.grid.points));
        if (c.grid.points < 2)
            bad_field("grid.points", "must be >= 2");
        if (auto lo = it->find("lo"); lo != it->end())
            c.grid.lo = as_number(*lo, "grid.lo");
        if (auto hi = it->find("hi"); hi != it->end())
            c.grid.hi = as_number(*hi, "grid.hi");
        if (c.grid.lo && c.grid.hi && !(*c.grid.lo < *c.grid.hi))
            bad_field("grid.hi", "must be greater than grid.lo");
    }
    if (auto it = j.find("compare_modes"); it != j.end()) {
        c.compare_modes.clear();
        for (const auto& v : *it) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                bad_field("compare_modes", "expected positive integers");
            c.compare_modes.push_back(v.get<int>());
        }
        if (c.compare_modes.empty())
            bad_field("compare_modes", "expected a non-empty array");
    }
    if (auto it = j.find("groups"); it != j.end())
        c.groups = parse_groups(*it, "groups");
    c.seed = static_cast<std::uint64_t>(get_integer(j, "seed", "", 1));
    if (auto it = j.find("seeds"); it != j.end()) {
        if (!it->is_array())
            bad_field("seeds", "expected an array of integers");
        for (const auto& v : *it) {
            if (!v.is_number_integer())
                bad_field("seeds", "expected an array of integers");
            c.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    c.output_dir = get_string(j, "output_dir", "", "");
    c.plots = get_bool(j, "plots", "", false);

    // Cross-field requirements.
    if ((c.experiment == "heatmap" || c.experiment == "sensitivity") && !c.noise_intervals)
        bad_field("noise", "required for heatmap and sensitivity experiments");
    return c;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), "cannot open config file");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError(path.string(), std::string("JSON parse error: ") + e.what());
    }
    return parse_config(root);
}

Signal build_signal(const SignalSpec& spec) {
    Signal s;
    if (spec.kind == "lorenz") {
        s = gen_lorenz(spec.lorenz);
    } else if (spec.kind == "mackey_glass") {
        s = gen_mackey_glass(spec.mackey_glass);
    } else if (spec.kind == "sine") {
        s = gen_sine(spec.f0, spec.fs, spec.duration);
    } else if (spec.kind == "sine_mixture") {
        s = gen_sine_mixture(spec.freqs, spec.fs, spec.duration);
    } else if (spec.kind == "file") {
        s = spec.format == "raw" ? read_signal_raw(spec.path) : read_signal_csv(spec.path);
    } else {
        throw ConfigError("signal.kind", "unknown signal kind " + spec.kind);
    }
    if (spec.normalize)
        s = normalize(s);
    if (spec.scale != 1.0)
        s = scale(s, spec.scale);
    return s;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::string& override_dir) {
    if (!override_dir.empty())
        return override_dir;
    if (!cfg.output_dir.empty())
        return cfg.output_dir;
    if (const char* env = std::getenv("QIPF_OUT_DIR"); env && *env)
        return env;
    return "out";
}

namespace {

EngineConfig engine_config(const ExperimentConfig& c) {
    EngineConfig ec;
    ec.kernel = c.kernel;
    ec.modes.num_modes = c.modes;
    ec.modes.normalize = c.hermite_normalize;
    ec.window = c.window;
    ec.eigen_scope = c.eigen_scope;
    ec.include_current = c.include_current;
    return ec;
}

NoiseSchedule make_schedule(const ExperimentConfig& c, std::uint64_t seed) {
    NoiseSchedule sched;
    sched.intervals = *c.noise_intervals;
    sched.rng_seed = seed;
    return sched;
}

std::vector<double> make_grid(const ExperimentConfig& c, const Signal& s) {
    double lo, hi;
    if (c.grid.lo && c.grid.hi) {
        lo = *c.grid.lo;
        hi = *c.grid.hi;
    } else {
        const auto [mn, mx] = std::minmax_element(s.samples.begin(), s.samples.end());
        lo = c.grid.lo.value_or(*mn - 2.0 * c.kernel.sigma);
        hi = c.grid.hi.value_or(*mx + 2.0 * c.kernel.sigma);
    }
    std::vector<double> grid(static_cast<std::size_t>(c.grid.points));
    const double step = (hi - lo) / static_cast<double>(c.grid.points - 1);
    for (int i = 0; i < c.grid.points; ++i)
        grid[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
    return grid;
}

std::string width_tag(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", w);
    std::string t = buf;
    for (char& ch : t)
        if (ch == '.')
            ch = 'p';
    return t;
}

struct Artifacts {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files;
    json report;

    std::filesystem::path file(const std::string& name) {
        files.push_back(dir / name);
        return files.back();
    }
};

void run_spatial(const ExperimentConfig& c, Artifacts& a) {
    const Signal sig = build_signal(c.signal);
    const std::vector<double> grid = make_grid(c, sig);
    std::vector<double> widths = c.kernel_widths;
    if (widths.empty())
        widths = {c.kernel.sigma};
    write_signal_csv(a.file("signal.csv"), sig);
    json per_width = json::array();
    for (double w : widths) {
        ExperimentConfig cw = c;
        cw.kernel.sigma = w;
        const SpatialResult res = spatial_qipf(grid, sig, engine_config(cw));
        std::vector<std::string> names = {"x", "psi", "ipf"};
        std::vector<std::span<const double>> cols = {res.grid, res.psi, res.ipf};
        std::vector<std::vector<double>> mode_cols(static_cast<std::size_t>(res.modes));
        for (int k = 1; k <= res.modes; ++k) {
            auto& col = mode_cols[static_cast<std::size_t>(k - 1)];
            col.resize(res.grid.size());
            for (std::size_t g = 0; g < res.grid.size(); ++g)
                col[g] = res.qipf[res.cell(g, k)];
            names.push_back("qipf_" + std::to_string(k));
            cols.emplace_back(col);
        }
        write_columns_csv(a.file("spatial_w" + width_tag(w) + ".csv"), names, cols);
        json e;
        e["kernel_width"] = w;
        e["eigenvalues"] = res.eigenvalue;
        e["fundamental_eigenvalue"] = res.fundamental_eigen;
        per_width.push_back(e);
        if (c.plots) {
            std::vector<std::pair<std::string, std::span<const double>>> series;
            for (int k = 1; k <= res.modes; ++k)
                series.emplace_back("qipf_" + std::to_string(k),
                                    mode_cols[static_cast<std::size_t>(k - 1)]);
            write_svg_lines(a.file("spatial_w" + width_tag(w) + ".svg"), res.grid, series,
                            "QIPF modes over the input space, width " + format_double(w));
        }
    }
    a.report["spatial"] = per_width;
}

void run_causal_compare(const ExperimentConfig& c, Artifacts& a) {
    // Evaluation points are the unscaled signal's samples; the stream the
    // wave-function is built from is the scaled copy.
    SignalSpec unscaled = c.signal;
    unscaled.scale = 1.0;
    const Signal eval_signal = build_signal(unscaled);
    const Signal stream = c.signal.scale != 1.0 ? scale(eval_signal, c.signal.scale)
                                                : eval_signal;
    write_signal_csv(a.file("signal.csv"), stream);
    write_signal_csv(a.file("eval_points.csv"), eval_signal);
    json per_modes = json::array();
    for (int m : c.compare_modes) {
        ExperimentConfig cm = c;
        cm.modes = m;
        const DecompositionTrace tr =
            decompose_stream_at(eval_signal.view(), stream, engine_config(cm));
        const std::vector<double> avg = mode_average(tr, 1, m);
        std::vector<double> idx(tr.rows());
        for (std::size_t i = 0; i < tr.rows(); ++i)
            idx[i] = static_cast<double>(tr.index[i]);
        write_columns_csv(a.file("compare_m" + std::to_string(m) + ".csv"),
                          {"index", "x", "classical_ipf", "qipf_avg"},
                          {idx, tr.x, tr.ipf, avg});
        json e;
        e["modes"] = m;
        e["rows"] = tr.rows();
        per_modes.push_back(e);
        if (c.plots)
            write_svg_lines(a.file("compare_m" + std::to_string(m) + ".svg"), idx,
                            {{"classical_ipf", tr.ipf}, {"qipf_avg", avg}},
                            "Classical IPF vs mean of " + std::to_string(m) + " QIPF modes");
    }
    a.report["causal_compare"] = per_modes;
}

void run_dominance(const ExperimentConfig& c, Artifacts& a) {
    const Signal sig = build_signal(c.signal);
    write_signal_csv(a.file("signal.csv"), sig);
    const DecompositionTrace tr = decompose_stream(sig, engine_config(c));
    write_trace_csv(a.file("trace.csv"), tr);
    const DominanceCounts dom = dominance_histogram(tr);
    const std::vector<double> prop = dom.proportions();
    std::vector<double> mode_ids(static_cast<std::size_t>(tr.modes));
    std::vector<double> counts(static_cast<std::size_t>(tr.modes));
    for (int k = 1; k <= tr.modes; ++k) {
        mode_ids[static_cast<std::size_t>(k - 1)] = k;
        counts[static_cast<std::size_t>(k - 1)] =
            static_cast<double>(dom.counts[static_cast<std::size_t>(k - 1)]);
    }
    write_columns_csv(a.file("dominance.csv"), {"mode", "count", "proportion"},
                      {mode_ids, counts, prop});
    a.report["dominance"] = {{"ties", dom.ties}, {"total", dom.total}};
    if (c.plots)
        write_svg_lines(a.file("dominance.svg"), mode_ids, {{"proportion", prop}},
                        "QIPF mode dominance proportions");
}

void run_eigencurve(const ExperimentConfig& c, Artifacts& a) {
    const Signal sig = build_signal(c.signal);
    write_signal_csv(a.file("signal.csv"), sig);
    const DecompositionTrace tr = decompose_stream(sig, engine_config(c));
    write_trace_csv(a.file("trace.csv"), tr);
    const std::vector<double> curve = eigenvalue_curve(tr);
    std::vector<double> mode_ids(curve.size()), raw(curve.size());
    const std::size_t last = tr.rows() - 1;
    for (int k = 1; k <= tr.modes; ++k) {
        mode_ids[static_cast<std::size_t>(k - 1)] = k;
        raw[static_cast<std::size_t>(k - 1)] = tr.eigen_at(last, k);
    }
    write_columns_csv(a.file("eigencurve.csv"),
                      {"mode", "min_ratio_eigenvalue", "ladder_energy", "normalized"},
                      {mode_ids, raw, tr.ladder_energy, curve});
    a.report["eigencurve"] = {{"modes", tr.modes}};
    if (c.plots)
        write_svg_lines(a.file("eigencurve.svg"), mode_ids, {{"normalized", curve}},
                        "Normalized energies per QIPF state");
}

void run_heatmap(const ExperimentConfig& c, Artifacts& a) {
    const Signal clean = build_signal(c.signal);
    write_signal_csv(a.file("signal_clean.csv"), clean);
    std::vector<std::uint64_t> seeds = c.seeds;
    if (seeds.empty())
        seeds = {c.seed};
    json per_seed = json::array();
    for (std::size_t si = 0; si < seeds.size(); ++si) {
        const std::string tag = seeds.size() > 1 ? "_s" + std::to_string(seeds[si]) : "";
        const NoiseSchedule sched = make_schedule(c, seeds[si]);
        const Signal noisy = add_noise(clean, sched);
        write_signal_csv(a.file("signal_noisy" + tag + ".csv"), noisy);
        const DecompositionTrace tr = decompose_stream(noisy, engine_config(c));
        write_trace_csv(a.file("trace" + tag + ".csv"), tr);
        const HeatmapMatrix hm = heatmap_matrix(tr);
        write_heatmap_pgm(a.file("heatmap" + tag + ".pgm"), hm);
        if (c.plots)
            write_svg_heatmap(a.file("heatmap" + tag + ".svg"), hm,
                              "Row-normalized QIPF state heat-map");

        // Per-sample group signals: the mean QIPF value and the mean
        // instantaneous response per state group.
        std::vector<std::string> names = {"index"};
        std::vector<std::vector<double>> cols;
        cols.emplace_back(tr.rows());
        for (std::size_t i = 0; i < tr.rows(); ++i)
            cols[0][i] = static_cast<double>(tr.index[i]);
        const std::size_t n_groups = c.groups.size();
        for (const auto& g : c.groups) {
            names.push_back("avg_" + std::to_string(g[0]) + "_" + std::to_string(g[1]));
            cols.push_back(mode_average(tr, g[0], g[1]));
        }
        for (const auto& g : c.groups) {
            names.push_back("act_" + std::to_string(g[0]) + "_" + std::to_string(g[1]));
            cols.push_back(mode_activity_average(tr, g[0], g[1]));
        }
        std::vector<std::span<const double>> views(cols.begin(), cols.end());
        write_columns_csv(a.file("groups" + tag + ".csv"), names, views);

        // Interval bookkeeping: realized noise variance vs per-group means.
        const auto& ivs = sched.intervals;
        std::vector<double> iv_var(ivs.size()), iv_db(ivs.size());
        std::vector<std::vector<double>> qipf_means(n_groups,
                                                    std::vector<double>(ivs.size(), 0.0));
        std::vector<std::vector<double>> act_means(n_groups,
                                                   std::vector<double>(ivs.size(), 0.0));
        for (std::size_t r = 0; r < ivs.size(); ++r) {
            double acc = 0.0;
            for (std::size_t i = ivs[r].start; i < ivs[r].end; ++i) {
                const double d = noisy.samples[i] - clean.samples[i];
                acc += d * d;
            }
            iv_var[r] = acc / static_cast<double>(ivs[r].end - ivs[r].start);
            iv_db[r] = ivs[r].snr_db;
            for (std::size_t gi = 0; gi < n_groups; ++gi) {
                double sum_q = 0.0, sum_a = 0.0;
                std::size_t cnt = 0;
                for (std::size_t row = 0; row < tr.rows(); ++row) {
                    const std::size_t s = static_cast<std::size_t>(tr.index[row] - 1);
                    if (s >= ivs[r].start && s < ivs[r].end) {
                        sum_q += cols[gi + 1][row];
                        sum_a += cols[gi + 1 + n_groups][row];
                        ++cnt;
                    }
                }
                qipf_means[gi][r] = cnt ? sum_q / static_cast<double>(cnt) : 0.0;
                act_means[gi][r] = cnt ? sum_a / static_cast<double>(cnt) : 0.0;
            }
        }
        std::vector<std::string> inames = {"snr_db", "noise_variance"};
        std::vector<std::span<const double>> icols = {iv_db, iv_var};
        for (std::size_t gi = 0; gi < n_groups; ++gi) {
            inames.push_back("mean_" + std::to_string(c.groups[gi][0]) + "_" +
                             std::to_string(c.groups[gi][1]));
            icols.emplace_back(qipf_means[gi]);
        }
        for (std::size_t gi = 0; gi < n_groups; ++gi) {
            inames.push_back("act_" + std::to_string(c.groups[gi][0]) + "_" +
                             std::to_string(c.groups[gi][1]));
            icols.emplace_back(act_means[gi]);
        }
        write_columns_csv(a.file("intervals" + tag + ".csv"), inames, icols);

        json seed_report;
        seed_report["seed"] = seeds[si];
        json corrs, acorrs;
        for (std::size_t gi = 0; gi < n_groups; ++gi) {
            const std::string key = std::to_string(c.groups[gi][0]) + "-" +
                                    std::to_string(c.groups[gi][1]);
            corrs[key] = pearson(qipf_means[gi], iv_var);
            // response strength: correlation magnitude of the activity signal
            acorrs[key] = std::fabs(pearson(act_means[gi], iv_var));
        }
        seed_report["variance_correlation"] = corrs;
        seed_report["activity_variance_correlation"] = acorrs;
        per_seed.push_back(seed_report);
    }
    a.report["heatmap"] = per_seed;
}

void run_sensitivity(const ExperimentConfig& c, Artifacts& a) {
    const Signal clean = build_signal(c.signal);
    write_signal_csv(a.file("signal_clean.csv"), clean);
    std::vector<double> widths = c.kernel_widths;
    if (widths.empty())
        widths = {c.kernel.sigma};

    SensitivityConfig sc;
    sc.interval_length = c.sensitivity.interval_length;
    sc.state_groups = c.sensitivity.state_groups;
    sc.runs = c.sensitivity.runs;
    sc.normalize_per_framework = c.sensitivity.normalize_per_framework;
    sc.noise_db.resize(c.noise_intervals->size());
    for (std::size_t r = 0; r < sc.noise_db.size(); ++r)
        sc.noise_db[r] = (*c.noise_intervals)[r].snr_db;
    if (c.sensitivity.db_range) {
        // Placeholder values; redrawn per run inside sensitivity_table.
        for (double& v : sc.noise_db)
            if (std::isnan(v))
                v = 0.0;
    } else {
        for (double v : sc.noise_db)
            if (std::isnan(v))
                bad_field("noise.intervals", "snr_db required unless sensitivity.db_range is set");
    }

    NoiseSchedule sched = make_schedule(c, c.seed);
    for (std::size_t r = 0; r < sched.intervals.size(); ++r)
        sched.intervals[r].snr_db = sc.noise_db[r];

    SensitivityTableOptions opts;
    opts.qipf_modes = c.modes;
    opts.include_current = c.include_current;
    opts.eigen_scope = c.eigen_scope;
    opts.db_range = c.sensitivity.db_range;

    const SensitivityTable table = sensitivity_table(clean, sched, widths, sc, opts);

    {
        auto path = a.file("sensitivity.csv");
        std::ofstream out(path);
        out << "framework";
        for (double w : table.widths) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", w);
            out << ",w" << buf;
        }
        out << '\n';
        for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
            out << table.row_labels[r];
            for (std::size_t col = 0; col < table.widths.size(); ++col)
                out << ',' << format_double(table.at(r, col));
            out << '\n';
        }
    }
    json rows = json::array();
    for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
        json row;
        row["framework"] = table.row_labels[r];
        std::vector<double> vals(table.widths.size());
        for (std::size_t col = 0; col < table.widths.size(); ++col)
            vals[col] = table.at(r, col);
        row["zeta"] = vals;
        rows.push_back(row);
    }
    a.report["sensitivity"] = {{"widths", table.widths}, {"rows", rows}};
}

}  // namespace

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg,
                                                  const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    Artifacts a;
    a.dir = outdir;
    a.report = json::object();

    if (cfg.experiment == "spatial")
        run_spatial(cfg, a);
    else if (cfg.experiment == "causal_compare")
        run_causal_compare(cfg, a);
    else if (cfg.experiment == "dominance")
        run_dominance(cfg, a);
    else if (cfg.experiment == "eigencurve")
        run_eigencurve(cfg, a);
    else if (cfg.experiment == "heatmap")
        run_heatmap(cfg, a);
    else if (cfg.experiment == "sensitivity")
        run_sensitivity(cfg, a);
    else
        throw ConfigError("experiment", "unknown experiment " + cfg.experiment);

    {
        std::ofstream out(outdir / "report.json");
        out << a.report.dump(2) << '\n';
        a.files.push_back(outdir / "report.json");
    }
    {
        json manifest;
        manifest["version"] = kLibraryVersion;
        manifest["config"] = config_to_json(cfg);
        json seeds = json::array();
        if (cfg.seeds.empty())
            seeds.push_back(cfg.seed);
        else
            for (auto s : cfg.seeds)
                seeds.push_back(s);
        manifest["seeds"] = seeds;
        json outputs = json::array();
        for (const auto& f : a.files)
            outputs.push_back(f.filename().string());
        manifest["outputs"] = outputs;
        std::ofstream out(outdir / "manifest.json");
        out << manifest.dump(2) << '\n';
        a.files.push_back(outdir / "manifest.json");
    }
    return a.files;
}

}  // namespace qipf
