#include "biphoton/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "biphoton/bench.hpp"
#include "biphoton/entanglement.hpp"
#include "biphoton/io.hpp"
#include "biphoton/overlap.hpp"

namespace biphoton::cli {

namespace {

// Flag validation failure that should exit 2 with a plain message.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Physics {
    double t0 = 1.0;
    double sigma_p = 25.0;
    double omega_p = 0.0;
    std::size_t grid_n = 512;
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::string kernel = "rect";
    double window = 4.0;
    unsigned threads = 1;
    std::string format;
    std::string out;
};

void add_physics(CLI::App* app, Physics& p, const std::string& default_format) {
    p.format = default_format;
    app->add_option("--t0", p.t0, "kernel support length")->capture_default_str();
    app->add_option("--sigma-p", p.sigma_p, "pump bandwidth, 1/t0")->capture_default_str();
    app->add_option("--omega-p", p.omega_p, "pump carrier frequency")->capture_default_str();
    app->add_option("--grid-n", p.grid_n, "samples per axis")->capture_default_str();
    app->add_option("--t-min", p.t_min, "grid start (fitted if absent)");
    app->add_option("--t-max", p.t_max, "grid end (fitted if absent)");
    app->add_option("--kernel", p.kernel, "kernel shape")
        ->check(CLI::IsMember({"rect", "triangle", "gauss"}))
        ->capture_default_str();
    app->add_option("--window", p.window, "coincidence half-width on |t1 - t2|")->capture_default_str();
    app->add_option("--threads", p.threads, "scan worker threads")->capture_default_str();
    app->add_option("--format", p.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_option("--out", p.out, "output file (stdout if absent)");
}

BiphotonModel model_of(const Physics& p) {
    BiphotonModel m;
    m.pump = PumpSpec{p.sigma_p, p.omega_p, 1.0};
    KernelSpec k;
    k.shape = *parse_kernel_shape(p.kernel);
    k.t0 = p.t0;
    m.form = Factored{k};
    m.validate();
    return m;
}

CoincidenceWindow window_of(const Physics& p) {
    CoincidenceWindow w{p.window, std::nullopt};
    w.validate();
    return w;
}

TimeGrid grid_of(const Physics& p, const BiphotonModel& m, DelayRange taus, DelayRange deltas) {
    if (p.t_min.has_value() != p.t_max.has_value()) throw UsageError("--t-min and --t-max go together");
    if (p.t_min) {
        if (!(*p.t_max > *p.t_min)) throw UsageError("--t-max must exceed --t-min");
        return TimeGrid(p.grid_n, *p.t_min, *p.t_max);
    }
    return fit_grid(m, p.grid_n, taus, deltas);
}

void emit(const Physics& p, const std::string& content, std::ostream& out) {
    if (p.out.empty() || p.out == "-") {
        out << content;
        return;
    }
    std::ofstream f(p.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + p.out);
    f << content;
}

void note_snaps(const std::vector<double>& requested, const TimeGrid& g, const char* name, std::ostream& err) {
    std::size_t moved = 0;
    double worst = 0.0;
    for (double v : requested) {
        const double shift = std::abs(snap_delay(g, v).snapped - v);
        if (shift > 1e-12 * std::max(1.0, std::abs(v))) ++moved;
        worst = std::max(worst, shift);
    }
    if (moved > 0) {
        err << "note: " << moved << " of " << requested.size() << " " << name << " values snapped to the grid (dt="
            << io::format_number(g.dt()) << ", max shift " << io::format_number(worst) << ")\n";
    }
}

const char* hint_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SupportClipped:
            return "widen the grid (--t-min/--t-max, or tmin/tmax in a bench file), or let it fit automatically (omit both flags, or `grid n=N fit`)";
        case ErrorKind::GridTooSmall:
            return "increase --grid-n, or narrow the delay range or the grid";
        case ErrorKind::NonCommensurateDelay:
            return "use delays that are multiples of the grid step";
        default:
            return nullptr;
    }
}

int cmd_dip_scan(const Physics& p, double tau_min, double tau_max, std::size_t steps,
                 std::optional<double> compensate, std::ostream& out, std::ostream& err) {
    if (steps < 2) throw UsageError("steps must be ≥ 2");
    if (!(tau_max > tau_min)) throw UsageError("--tau-max must exceed --tau-min");
    const auto model = model_of(p);
    const auto w = window_of(p);
    const double delta = compensate.value_or(0.0);
    const TimeGrid grid = grid_of(p, model, {tau_min, tau_max}, {delta, delta});
    const auto taus = linspace(tau_min, tau_max, steps);
    note_snaps(taus, grid, "tau1", err);
    if (compensate) note_snaps({*compensate}, grid, "delta", err);
    const auto amp = build_biphoton(model, grid);
    const auto curve = dip_scan(amp, taus, w, Compensation{Compensation::Mode::Fixed, delta}, p.threads);
    emit(p, p.format == "json" ? io::dump(io::dip_curve_json(curve)) : io::dip_curve_csv(curve), out);
    return kExitOk;
}

int cmd_overlap(const Physics& p, double tau1, double delta, std::ostream& out, std::ostream& err) {
    if (p.format != "json") throw UsageError("overlap reports are json only");
    const auto model = model_of(p);
    const auto w = window_of(p);
    const TimeGrid grid = grid_of(p, model, {tau1, tau1}, {delta, delta});
    note_snaps({tau1}, grid, "tau1", err);
    note_snaps({delta}, grid, "delta", err);
    const double t = snap_delay(grid, tau1).snapped;
    const double d = snap_delay(grid, delta).snapped;
    const auto amp = build_biphoton(model, grid);
    const auto band = model.t_minus_band();
    const auto s = run_pipeline(amp, SupportBand{band.first, band.second}, PipelineConfig{t, true, d});
    const auto report = overlap_report(s, w);
    emit(p, io::dump(io::overlap_json(report, {t, d, w, p.sigma_p})), out);
    return kExitOk;
}

int cmd_schmidt(const Physics& p, double threshold, bool separable, const std::string& modes_out,
                std::ostream& out) {
    if (!(threshold >= 0.0)) throw UsageError("--threshold must be non-negative");
    const auto model = model_of(p);
    const TimeGrid grid = [&] {
        if (!separable || p.t_min || p.t_max) return grid_of(p, model, {}, {});
        // The product needs [0, t0] along t1 and the pump envelope along t2.
        const double reach = model.pump.half_extent();
        const double pad = 0.05 * p.t0;
        return TimeGrid(p.grid_n, std::min(-reach, 0.0) - pad, std::max(reach, p.t0) + pad);
    }();
    JointAmplitude amp(grid);
    if (separable) {
        // f(t1) g(t2): the kernel along t1 times the pump envelope along t2.
        const auto& k = std::get<Factored>(model.form).u;
        const auto f = sample_kernel(k, grid);
        const auto g = sample_pump(model.pump, grid);
        amp = JointAmplitude(grid, f.values * g.values.transpose()).normalized();
    } else {
        amp = build_biphoton(model, grid);
    }
    const auto spec = schmidt_decompose(amp, threshold);
    if (!modes_out.empty()) {
        std::ofstream f(modes_out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + modes_out);
        f << io::schmidt_modes_csv(spec);
    }
    emit(p, p.format == "csv" ? io::schmidt_modes_csv(spec) : io::dump(io::schmidt_json(spec)), out);
    return kExitOk;
}

int cmd_regions(const Physics& p, double tau1, double delta, std::optional<double> idler_t0,
                std::optional<double> tp_min, std::optional<double> tp_max, std::ostream& out) {
    if (tp_min.has_value() != tp_max.has_value()) throw UsageError("--tprime-min and --tprime-max go together");
    const double ti = idler_t0.value_or(p.t0);
    const double eff = tau1 - delta;
    const double reach = std::abs(eff) + 2.0 * std::max(p.t0, ti);
    const std::pair<double, double> range = tp_min ? std::make_pair(*tp_min, *tp_max) : std::make_pair(-reach, reach);
    const auto r = figure1_regions(eff, p.t0, range, ti);
    emit(p, p.format == "json" ? io::dump(io::regions_json(r, eff, p.t0, ti)) : io::regions_csv(r), out);
    return kExitOk;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmd_bench_check(const std::string& file, std::ostream& out) {
    bench::parse(read_file(file));
    out << "OK\n";
    return kExitOk;
}

int cmd_bench_run(const std::string& file, const std::string& out_dir, const std::string& manifest,
                  unsigned threads, std::ostream& out) {
    const auto program = bench::parse(read_file(file));
    const auto result = bench::run(program, threads);
    bench::write_artifacts(result, out_dir);
    const std::string m = io::dump(result.manifest);
    if (manifest == "-") {
        out << m;
    } else if (!manifest.empty()) {
        std::ofstream f(manifest, std::ios::binary);
        if (!f) throw UsageError("cannot write " + manifest);
        f << m;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Biphoton and Hong-Ou-Mandel interference simulator", "biphoton"};
    app.require_subcommand(1);

    Physics dip_p, ov_p, sc_p, rg_p;

    auto* dip = app.add_subcommand("dip-scan", "normalized coincidence rate versus signal delay");
    add_physics(dip, dip_p, "csv");
    double tau_min = -0.5, tau_max = 1.5;
    std::size_t steps = 201;
    std::optional<double> dip_comp;
    dip->add_option("--tau-min", tau_min, "first signal delay")->capture_default_str();
    dip->add_option("--tau-max", tau_max, "last signal delay")->capture_default_str();
    dip->add_option("--steps", steps, "number of scan points")->capture_default_str();
    dip->add_option("--compensate", dip_comp, "signal delay after the splitter");

    auto* ov = app.add_subcommand("overlap", "overlap of the two amplitudes after the splitter");
    add_physics(ov, ov_p, "json");
    double ov_tau = 0.5, ov_delta = 0.0;
    ov->add_option("--tau1", ov_tau, "signal delay before the splitter")->capture_default_str();
    ov->add_option("--compensate", ov_delta, "signal delay after the splitter")->capture_default_str();

    auto* sc = app.add_subcommand("schmidt", "Schmidt spectrum and entanglement measures");
    add_physics(sc, sc_p, "json");
    double threshold = 1e-10;
    bool separable = false;
    std::string modes_out;
    sc->add_option("--threshold", threshold, "rank counts coefficients above this value")->capture_default_str();
    sc->add_flag("--separable", separable, "use a product amplitude f(t1) g(t2)");
    sc->add_option("--modes-out", modes_out, "write mode functions as CSV");

    auto* rg = app.add_subcommand("regions", "support regions of the two terms in the (t', t-) plane");
    add_physics(rg, rg_p, "csv");
    double rg_tau = 0.5, rg_delta = 0.0;
    std::optional<double> idler_t0, tp_min, tp_max;
    rg->add_option("--tau1", rg_tau, "signal delay before the splitter")->capture_default_str();
    rg->add_option("--compensate", rg_delta, "signal delay after the splitter")->capture_default_str();
    rg->add_option("--idler-t0", idler_t0, "idler kernel support (defaults to --t0)");
    rg->add_option("--tprime-min", tp_min, "t' range start (with --tprime-max)");
    rg->add_option("--tprime-max", tp_max, "t' range end (with --tprime-min)");

    auto* bn = app.add_subcommand("bench", "check or run a bench file");
    bn->require_subcommand(1);
    std::string check_file, run_file, out_dir = ".", manifest;
    unsigned bench_threads = 1;
    auto* bcheck = bn->add_subcommand("check", "parse and validate");
    bcheck->add_option("file", check_file, "bench file")->required();
    auto* brun = bn->add_subcommand("run", "execute and write outputs");
    brun->add_option("file", run_file, "bench file")->required();
    brun->add_option("--out-dir", out_dir, "base directory for relative output paths")->capture_default_str();
    brun->add_option("--manifest", manifest, "write the run manifest here ('-' for stdout)");
    brun->add_option("--threads", bench_threads, "scan worker threads")->capture_default_str();

    auto* ver = app.add_subcommand("version", "print version");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (dip->parsed()) return cmd_dip_scan(dip_p, tau_min, tau_max, steps, dip_comp, out, err);
        if (ov->parsed()) return cmd_overlap(ov_p, ov_tau, ov_delta, out, err);
        if (sc->parsed()) return cmd_schmidt(sc_p, threshold, separable, modes_out, out);
        if (rg->parsed()) return cmd_regions(rg_p, rg_tau, rg_delta, idler_t0, tp_min, tp_max, out);
        if (bcheck->parsed()) return cmd_bench_check(check_file, out);
        if (brun->parsed()) return cmd_bench_run(run_file, out_dir, manifest, bench_threads, out);
        if (ver->parsed()) {
            out << "biphoton " << io::kVersion << " (schema " << io::kSchemaVersion << ")\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        if (const char* hint = hint_for(e.kind())) err << "hint: " << hint << "\n";
        return e.is_physics() ? kExitPhysics : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace biphoton::cli
