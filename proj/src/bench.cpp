#include "biphoton/bench.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "biphoton/entanglement.hpp"
#include "biphoton/io.hpp"
#include "biphoton/overlap.hpp"

namespace biphoton::bench {

namespace {

struct Token {
    std::string text;
    int col;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t k = 0;
    while (k < line.size()) {
        if (line[k] == '#') break;
        if (line[k] == ' ' || line[k] == '\t' || line[k] == '\r') {
            ++k;
            continue;
        }
        const std::size_t start = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r' && line[k] != '#') ++k;
        out.push_back({line.substr(start, k - start), static_cast<int>(start) + 1});
    }
    return out;
}

const std::regex& number_pattern() {
    static const std::regex re(R"(^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?$)");
    return re;
}

double parse_number(const std::string& text, int line, int col) {
    if (!std::regex_match(text, number_pattern())) {
        throw SyntaxError(line, col, "bad number '" + text + "'");
    }
    const double v = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(v)) throw SyntaxError(line, col, "number out of range '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& text, int line, int col) {
    static const std::regex re(R"(^\+?[0-9]+$)");
    if (!std::regex_match(text, re) || text.size() > 9) {
        throw SyntaxError(line, col, "bad integer '" + text + "'");
    }
    return static_cast<std::size_t>(std::stoul(text));
}

// key=value arguments of one directive.
class KeyValues {
public:
    KeyValues(const std::string& directive, const std::vector<Token>& tokens, std::size_t first, int line,
              std::initializer_list<const char*> allowed)
        : directive_(directive), line_(line) {
        for (std::size_t k = first; k < tokens.size(); ++k) {
            const auto& tok = tokens[k];
            const auto eq = tok.text.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == tok.text.size() ||
                tok.text.find('=', eq + 1) != std::string::npos) {
                throw SyntaxError(line, tok.col, "malformed key=value '" + tok.text + "'");
            }
            const std::string key = tok.text.substr(0, eq);
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw SyntaxError(line, tok.col, "unknown key '" + key + "' for " + directive);
            if (values_.count(key)) throw SyntaxError(line, tok.col, "duplicate key '" + key + "'");
            values_[key] = {tok.text.substr(eq + 1), tok.col + static_cast<int>(eq) + 1};
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::optional<double> number(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return parse_number(it->second.text, line_, it->second.col);
    }

    double required_number(const std::string& key) const {
        auto v = number(key);
        if (!v) throw SyntaxError(line_, 1, directive_ + " requires " + key + "=");
        return *v;
    }

    std::optional<std::string> text(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second.text;
    }

    int col(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? 1 : it->second.col;
    }

    std::size_t required_count(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw SyntaxError(line_, 1, directive_ + " requires " + key + "=");
        return parse_count(it->second.text, line_, it->second.col);
    }

private:
    std::string directive_;
    int line_;
    std::map<std::string, Token> values_;
};

void expect_arity(const std::vector<Token>& tokens, std::size_t count, int line, const std::string& usage) {
    if (tokens.size() != count) {
        const int col = tokens.size() > count ? tokens[count].col : tokens.back().col;
        throw SyntaxError(line, col, "expected '" + usage + "'");
    }
}

KernelSpec parse_kernel(const std::vector<Token>& tokens, int line) {
    if (tokens.size() < 2) throw SyntaxError(line, tokens[0].col, "kernel needs a shape (rect, triangle, gauss)");
    const auto shape = parse_kernel_shape(tokens[1].text);
    if (!shape) throw SyntaxError(line, tokens[1].col, "unknown kernel shape '" + tokens[1].text + "'");
    KeyValues kv(tokens[0].text, tokens, 2, line, {"t0", "center", "width"});
    KernelSpec k;
    k.shape = *shape;
    k.t0 = kv.required_number("t0");
    if (*shape != KernelShape::GaussianWindowed && (kv.has("center") || kv.has("width"))) {
        throw SyntaxError(line, kv.has("center") ? kv.col("center") : kv.col("width"),
                          "center/width apply to gauss kernels only");
    }
    k.center = kv.number("center");
    k.width = kv.number("width");
    return k;
}

void check_kernel(const KernelSpec& k, int line) {
    if (!(k.t0 > 0.0)) throw SemanticError(line, "t0 must be positive");
    if (k.width && !(*k.width > 0.0)) throw SemanticError(line, "width must be positive");
}

std::string fmt_exact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    // Keep whole numbers readable: "2" rather than "2.0000000000000000".
    return s;
}

}  // namespace

BiphotonModel BenchProgram::model() const {
    BiphotonModel m;
    m.pump = pump;
    if (kernel2) {
        m.form = KernelIntegral{kernel, *kernel2};
    } else {
        m.form = Factored{kernel};
    }
    return m;
}

bool BenchProgram::has_splitter() const {
    for (const auto& e : elements) {
        if (e.kind == ElementSpec::Kind::BeamSplitter) return true;
    }
    return false;
}

double BenchProgram::total_delay() const {
    double acc = 0.0;
    for (const auto& e : elements) {
        if (e.kind == ElementSpec::Kind::DelaySignal) acc += e.value;
    }
    return acc;
}

double BenchProgram::total_compensation() const {
    double acc = 0.0;
    for (const auto& e : elements) {
        if (e.kind == ElementSpec::Kind::Compensate) acc += e.value;
    }
    return acc;
}

BenchProgram parse(const std::string& text) {
    BenchProgram p;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool seen_splitter = false;

    while (std::getline(in, raw)) {
        ++line;
        const auto tokens = tokenize(raw);
        if (tokens.empty()) continue;
        const std::string& d = tokens[0].text;

        if (d == "pump") {
            KeyValues kv(d, tokens, 1, line, {"sigma", "omega", "amp"});
            if (p.pump_line) throw SemanticError(line, "duplicate pump (first at line " + std::to_string(p.pump_line) + ")");
            p.pump.sigma_p = kv.required_number("sigma");
            p.pump.omega_p = kv.number("omega").value_or(0.0);
            p.pump.amp = kv.number("amp").value_or(1.0);
            if (!(p.pump.sigma_p > 0.0)) throw SemanticError(line, "sigma must be positive");
            if (!(p.pump.omega_p >= 0.0)) throw SemanticError(line, "omega must be non-negative");
            if (!(p.pump.amp > 0.0)) throw SemanticError(line, "amp must be positive");
            p.pump_line = line;
        } else if (d == "kernel" || d == "kernel2") {
            KernelSpec k = parse_kernel(tokens, line);
            check_kernel(k, line);
            if (d == "kernel") {
                if (p.kernel_line) throw SemanticError(line, "duplicate kernel (first at line " + std::to_string(p.kernel_line) + ")");
                p.kernel = k;
                p.kernel_line = line;
            } else {
                if (p.kernel2_line) throw SemanticError(line, "duplicate kernel2 (first at line " + std::to_string(p.kernel2_line) + ")");
                p.kernel2 = k;
                p.kernel2_line = line;
            }
        } else if (d == "grid") {
            // "fit" is the only bare word allowed among the grid arguments.
            std::vector<Token> kv_tokens{tokens[0]};
            bool fit = false;
            for (std::size_t k = 1; k < tokens.size(); ++k) {
                if (tokens[k].text == "fit") {
                    if (fit) throw SyntaxError(line, tokens[k].col, "duplicate 'fit'");
                    fit = true;
                } else {
                    kv_tokens.push_back(tokens[k]);
                }
            }
            KeyValues kv(d, kv_tokens, 1, line, {"n", "tmin", "tmax"});
            if (p.grid.line) throw SemanticError(line, "duplicate grid (first at line " + std::to_string(p.grid.line) + ")");
            p.grid.n = kv.required_count("n");
            p.grid.fit = fit;
            if (fit) {
                if (kv.has("tmin") || kv.has("tmax")) {
                    throw SyntaxError(line, kv.has("tmin") ? kv.col("tmin") : kv.col("tmax"),
                                      "grid takes either 'fit' or tmin=/tmax=, not both");
                }
            } else {
                p.grid.t_min = kv.required_number("tmin");
                p.grid.t_max = kv.required_number("tmax");
            }
            p.grid.line = line;
            if (p.grid.n < 2) throw SemanticError(line, "grid n must be at least 2");
            if (!fit && !(*p.grid.t_max > *p.grid.t_min)) throw SemanticError(line, "grid tmax must exceed tmin");
        } else if (d == "delay" || d == "compensate") {
            expect_arity(tokens, 3, line, d + " signal <time>");
            if (tokens[1].text != "signal") {
                throw SyntaxError(line, tokens[1].col, d + " acts on 'signal' only, got '" + tokens[1].text + "'");
            }
            const double v = parse_number(tokens[2].text, line, tokens[2].col);
            if (d == "delay" && seen_splitter) throw SemanticError(line, "delay must precede beamsplitter");
            if (d == "compensate" && !seen_splitter) throw SemanticError(line, "compensate must follow beamsplitter");
            p.elements.push_back({d == "delay" ? ElementSpec::Kind::DelaySignal : ElementSpec::Kind::Compensate, v, line});
        } else if (d == "beamsplitter") {
            expect_arity(tokens, 1, line, "beamsplitter");
            if (seen_splitter) throw SemanticError(line, "only one beamsplitter is allowed");
            seen_splitter = true;
            p.elements.push_back({ElementSpec::Kind::BeamSplitter, 0.0, line});
        } else if (d == "window") {
            if (tokens.size() < 2) throw SyntaxError(line, tokens[0].col, "window needs a half-width");
            const double w = parse_number(tokens[1].text, line, tokens[1].col);
            KeyValues kv(d, tokens, 2, line, {"tplus_min", "tplus_max"});
            if (p.window_line) throw SemanticError(line, "duplicate window (first at line " + std::to_string(p.window_line) + ")");
            if (!(w > 0.0)) throw SemanticError(line, "window half-width must be positive");
            p.window = CoincidenceWindow{w, std::nullopt};
            if (kv.has("tplus_min") || kv.has("tplus_max")) {
                const double lo = kv.required_number("tplus_min");
                const double hi = kv.required_number("tplus_max");
                if (!(hi > lo)) throw SemanticError(line, "tplus_max must exceed tplus_min");
                p.window.t_plus = std::make_pair(lo, hi);
            }
            p.window_line = line;
        } else if (d == "scan") {
            expect_arity(tokens, 5, line, "scan <tau1|delta> <lo> <hi> <steps>");
            ScanSpec s;
            if (tokens[1].text == "tau1") {
                s.variable = ScanSpec::Variable::Tau1;
            } else if (tokens[1].text == "delta") {
                s.variable = ScanSpec::Variable::Delta;
            } else {
                throw SyntaxError(line, tokens[1].col, "scan variable must be tau1 or delta");
            }
            s.lo = parse_number(tokens[2].text, line, tokens[2].col);
            s.hi = parse_number(tokens[3].text, line, tokens[3].col);
            s.steps = parse_count(tokens[4].text, line, tokens[4].col);
            s.line = line;
            if (p.scan) throw SemanticError(line, "duplicate scan (first at line " + std::to_string(p.scan->line) + ")");
            if (!(s.hi > s.lo)) throw SemanticError(line, "scan bounds need lo < hi");
            if (s.steps < 2) throw SemanticError(line, "scan steps must be ≥ 2");
            p.scan = s;
        } else if (d == "output") {
            if (tokens.size() < 3) throw SyntaxError(line, tokens[0].col, "expected 'output <csv|json> <path> [what=...]'");
            OutputSpec o;
            if (tokens[1].text == "csv") {
                o.format = OutputSpec::Format::Csv;
            } else if (tokens[1].text == "json") {
                o.format = OutputSpec::Format::Json;
            } else {
                throw SyntaxError(line, tokens[1].col, "output format must be csv or json");
            }
            o.path = tokens[2].text;
            if (o.path.find('=') != std::string::npos) {
                throw SyntaxError(line, tokens[2].col, "output path expected before key=value arguments");
            }
            KeyValues kv(d, tokens, 3, line, {"what"});
            if (auto w = kv.text("what")) {
                if (*w == "dip") o.what = OutputSpec::What::Dip;
                else if (*w == "overlap") o.what = OutputSpec::What::Overlap;
                else if (*w == "schmidt") o.what = OutputSpec::What::Schmidt;
                else if (*w == "regions") o.what = OutputSpec::What::Regions;
                else throw SyntaxError(line, kv.col("what"), "unknown output kind '" + *w + "'");
            }
            o.line = line;
            p.outputs.push_back(o);
        } else {
            throw SyntaxError(line, tokens[0].col, "unknown directive '" + d + "'");
        }
    }

    const int eof = std::max(line, 1);
    if (!p.pump_line) throw SemanticError(eof, "missing pump directive");
    if (!p.kernel_line) throw SemanticError(eof, "missing kernel directive");
    if (!p.grid.line) throw SemanticError(eof, "missing grid directive");

    if (!p.grid.fit) {
        const TimeGrid g(p.grid.n, *p.grid.t_min, *p.grid.t_max);
        const double tol = 1e-9 * g.dt();
        auto covers = [&](const KernelSpec& k) { return g.contains(0.0, tol) && g.contains(k.t0, tol); };
        if (!covers(p.kernel) || (p.kernel2 && !covers(*p.kernel2))) {
            throw SemanticError(p.grid.line, "grid does not cover the kernel support [0, t0]");
        }
    }

    if (p.scan) {
        if (p.scan->variable == ScanSpec::Variable::Delta && !seen_splitter) {
            throw SemanticError(p.scan->line, "scan delta needs a beamsplitter");
        }
        int delays = 0, comps = 0;
        for (const auto& e : p.elements) {
            delays += e.kind == ElementSpec::Kind::DelaySignal;
            comps += e.kind == ElementSpec::Kind::Compensate;
        }
        if (p.scan->variable == ScanSpec::Variable::Tau1 && delays > 1) {
            throw SemanticError(p.scan->line, "scan tau1 replaces the signal delay; use at most one delay line");
        }
        if (p.scan->variable == ScanSpec::Variable::Delta && comps > 1) {
            throw SemanticError(p.scan->line, "scan delta replaces the compensation; use at most one compensate line");
        }
    }

    for (const auto& o : p.outputs) {
        const auto what = o.resolved(p.scan.has_value());
        if ((what == OutputSpec::What::Dip || what == OutputSpec::What::Overlap) && !seen_splitter) {
            throw SemanticError(o.line, "this output needs a beamsplitter");
        }
        if (what == OutputSpec::What::Overlap && o.format == OutputSpec::Format::Csv) {
            throw SemanticError(o.line, "overlap reports are json only");
        }
    }
    return p;
}

std::string pretty_print(const BenchProgram& p) {
    std::string out;
    out += "pump sigma=" + fmt_exact(p.pump.sigma_p) + " omega=" + fmt_exact(p.pump.omega_p);
    if (p.pump.amp != 1.0) out += " amp=" + fmt_exact(p.pump.amp);
    out += "\n";
    auto kernel_line = [&](const char* name, const KernelSpec& k) {
        out += std::string(name) + " " + to_string(k.shape) + " t0=" + fmt_exact(k.t0);
        if (k.center) out += " center=" + fmt_exact(*k.center);
        if (k.width) out += " width=" + fmt_exact(*k.width);
        out += "\n";
    };
    kernel_line("kernel", p.kernel);
    if (p.kernel2) kernel_line("kernel2", *p.kernel2);
    out += "grid n=" + std::to_string(p.grid.n);
    if (p.grid.fit) {
        out += " fit\n";
    } else {
        out += " tmin=" + fmt_exact(*p.grid.t_min) + " tmax=" + fmt_exact(*p.grid.t_max) + "\n";
    }
    for (const auto& e : p.elements) {
        switch (e.kind) {
            case ElementSpec::Kind::DelaySignal: out += "delay signal " + fmt_exact(e.value) + "\n"; break;
            case ElementSpec::Kind::BeamSplitter: out += "beamsplitter\n"; break;
            case ElementSpec::Kind::Compensate: out += "compensate signal " + fmt_exact(e.value) + "\n"; break;
        }
    }
    if (p.window_line) {
        out += "window " + fmt_exact(p.window.half_width);
        if (p.window.t_plus) {
            out += " tplus_min=" + fmt_exact(p.window.t_plus->first) + " tplus_max=" + fmt_exact(p.window.t_plus->second);
        }
        out += "\n";
    }
    if (p.scan) {
        out += std::string("scan ") + (p.scan->variable == ScanSpec::Variable::Tau1 ? "tau1" : "delta") + " " +
               fmt_exact(p.scan->lo) + " " + fmt_exact(p.scan->hi) + " " + std::to_string(p.scan->steps) + "\n";
    }
    for (const auto& o : p.outputs) {
        out += std::string("output ") + (o.format == OutputSpec::Format::Csv ? "csv " : "json ") + o.path;
        if (o.what) {
            static const char* names[] = {"dip", "overlap", "schmidt", "regions"};
            out += std::string(" what=") + names[static_cast<int>(*o.what)];
        }
        out += "\n";
    }
    return out;
}

namespace {

int first_line_of(const BenchProgram& p, ElementSpec::Kind kind) {
    for (const auto& e : p.elements) {
        if (e.kind == kind) return e.line;
    }
    return 0;
}

}  // namespace

RunResult run(const BenchProgram& p, unsigned threads) {
    int current_line = p.grid.line;
    try {
        const BiphotonModel model = p.model();
        const bool scan_tau = p.scan && p.scan->variable == ScanSpec::Variable::Tau1;
        const bool scan_delta = p.scan && p.scan->variable == ScanSpec::Variable::Delta;

        const TimeGrid grid = [&] {
            if (!p.grid.fit) return TimeGrid(p.grid.n, *p.grid.t_min, *p.grid.t_max);
            DelayRange taus{p.total_delay(), p.total_delay()};
            DelayRange deltas{p.total_compensation(), p.total_compensation()};
            if (scan_tau) taus = {p.scan->lo, p.scan->hi};
            if (scan_delta) deltas = {p.scan->lo, p.scan->hi};
            return fit_grid(model, p.grid.n, taus, deltas);
        }();

        current_line = p.kernel2_line ? p.kernel2_line : p.kernel_line;
        const JointAmplitude amp = build_biphoton(model, grid);

        nlohmann::json snapped = nlohmann::json::array();
        double tau1 = 0.0, delta = 0.0;
        for (const auto& e : p.elements) {
            if (e.kind == ElementSpec::Kind::BeamSplitter) continue;
            const auto s = snap_delay(grid, e.value);
            const bool is_delay = e.kind == ElementSpec::Kind::DelaySignal;
            (is_delay ? tau1 : delta) += s.snapped;
            snapped.push_back({{"line", e.line}, {"element", is_delay ? "delay" : "compensate"},
                               {"requested", e.value}, {"snapped", s.snapped}, {"steps", s.steps}});
        }

        std::vector<double> scan_values;
        nlohmann::json scan_json = nullptr;
        if (p.scan) {
            scan_values = linspace(p.scan->lo, p.scan->hi, p.scan->steps);
            double max_shift = 0.0;
            for (double v : scan_values) max_shift = std::max(max_shift, std::abs(snap_delay(grid, v).snapped - v));
            scan_json = {{"line", p.scan->line}, {"variable", scan_tau ? "tau1" : "delta"}, {"lo", p.scan->lo},
                         {"hi", p.scan->hi}, {"steps", p.scan->steps}, {"max_snap_shift", max_shift}};
        }

        const int delay_line = scan_tau ? p.scan->line : first_line_of(p, ElementSpec::Kind::DelaySignal);
        const int comp_line = scan_delta ? p.scan->line : first_line_of(p, ElementSpec::Kind::Compensate);
        auto staged = [&](auto&& fn) {
            try {
                return fn();
            } catch (const PipelineStageError& e) {
                current_line = e.stage() == PipelineStage::Delay ? delay_line : comp_line;
                if (current_line == 0) current_line = p.grid.line;
                throw Error(e.kind(), e.what());
            }
        };

        std::optional<DipCurve> dip;
        auto dip_curve = [&]() -> const DipCurve& {
            if (!dip) {
                dip = staged([&] {
                    if (scan_tau) return dip_scan(amp, scan_values, p.window, Compensation{Compensation::Mode::Fixed, delta}, threads);
                    if (scan_delta) return compensation_scan(amp, tau1, scan_values, p.window, threads);
                    const std::vector<double> one{tau1};
                    return dip_scan(amp, one, p.window, Compensation{Compensation::Mode::Fixed, delta}, 1);
                });
            }
            return *dip;
        };

        RunResult result{grid, {}, {}};
        nlohmann::json paths = nlohmann::json::array();
        for (const auto& o : p.outputs) {
            current_line = o.line;
            const bool csv = o.format == OutputSpec::Format::Csv;
            std::string content;
            switch (o.resolved(p.scan.has_value())) {
                case OutputSpec::What::Dip: {
                    const auto& c = dip_curve();
                    content = csv ? io::dip_curve_csv(c) : io::dump(io::dip_curve_json(c));
                    break;
                }
                case OutputSpec::What::Overlap: {
                    const TermSum s = staged([&] {
                        return run_pipeline(amp, SupportBand{model.t_minus_band().first, model.t_minus_band().second},
                                            PipelineConfig{tau1, true, delta});
                    });
                    const auto report = overlap_report(s, p.window);
                    content = io::dump(io::overlap_json(report, {tau1, delta, p.window, p.pump.sigma_p}));
                    break;
                }
                case OutputSpec::What::Schmidt: {
                    const auto spec = schmidt_decompose(amp);
                    content = csv ? io::schmidt_modes_csv(spec) : io::dump(io::schmidt_json(spec));
                    break;
                }
                case OutputSpec::What::Regions: {
                    const double t0 = p.kernel.t0;
                    const double ti = p.kernel2 ? p.kernel2->t0 : t0;
                    const double eff = tau1 - delta;
                    const double reach = std::abs(eff) + 2.0 * std::max(t0, ti);
                    const auto r = figure1_regions(eff, t0, {-reach, reach}, ti);
                    content = csv ? io::regions_csv(r) : io::dump(io::regions_json(r, eff, t0, ti));
                    break;
                }
            }
            result.artifacts.push_back({o.path, std::move(content)});
            paths.push_back(o.path);
        }

        result.manifest = {{"schema_version", io::kSchemaVersion},
                           {"kind", "run_manifest"},
                           {"grid", io::grid_json(grid)},
                           {"snapped_delays", snapped},
                           {"scan", scan_json},
                           {"outputs", paths},
                           {"versions", {{"biphoton", io::kVersion}, {"schema", io::kSchemaVersion}}}};
        return result;
    } catch (const SyntaxError&) {
        throw;
    } catch (const SemanticError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(current_line) + ": " + e.what());
    }
}

void write_artifacts(const RunResult& r, const std::string& base_dir) {
    namespace fs = std::filesystem;
    for (const auto& a : r.artifacts) {
        fs::path path(a.path);
        if (path.is_relative()) path = fs::path(base_dir) / path;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
        out << a.content;
    }
}

}  // namespace biphoton::bench
