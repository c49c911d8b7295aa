#pragma once

// Line-oriented experiment description ("bench file") and its executor.
// The grammar is documented in docs/GRAMMAR.md.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/correlations.hpp"
#include "biphoton/source.hpp"

namespace biphoton::bench {

/// Unknown directive, malformed key=value, bad number, wrong arity.
class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& message)
        : Error(ErrorKind::SyntaxError, "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + message),
          line_(line), col_(col), message_(message) {}
    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_, col_;
    std::string message_;
};

/// Well-formed directives that violate a program invariant.
class SemanticError : public Error {
public:
    SemanticError(int line, const std::string& message)
        : Error(ErrorKind::SemanticError, "line " + std::to_string(line) + ": " + message),
          line_(line), message_(message) {}
    int line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    std::string message_;
};

struct GridDirective {
    std::size_t n = 0;
    std::optional<double> t_min;
    std::optional<double> t_max;
    bool fit = false;  // "grid n=N fit": size the grid from the program
    int line = 0;
};

struct ElementSpec {
    enum class Kind { DelaySignal, BeamSplitter, Compensate };
    Kind kind;
    double value = 0.0;
    int line = 0;
};

struct ScanSpec {
    enum class Variable { Tau1, Delta };
    Variable variable = Variable::Tau1;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 0;
    int line = 0;
};

struct OutputSpec {
    enum class Format { Csv, Json };
    enum class What { Dip, Overlap, Schmidt, Regions };
    Format format = Format::Csv;
    std::string path;
    std::optional<What> what;  // explicit what=...
    int line = 0;

    What resolved(bool has_scan) const { return what.value_or(has_scan ? What::Dip : What::Overlap); }
};

struct BenchProgram {
    PumpSpec pump;
    int pump_line = 0;
    KernelSpec kernel;
    int kernel_line = 0;
    std::optional<KernelSpec> kernel2;
    int kernel2_line = 0;
    GridDirective grid;
    std::vector<ElementSpec> elements;
    CoincidenceWindow window;
    int window_line = 0;  // 0: default window
    std::optional<ScanSpec> scan;
    std::vector<OutputSpec> outputs;

    BiphotonModel model() const;
    bool has_splitter() const;
    double total_delay() const;
    double total_compensation() const;
};

BenchProgram parse(const std::string& text);

/// Canonical text; parse(pretty_print(p)) reproduces p up to line numbers.
std::string pretty_print(const BenchProgram& p);

struct Artifact {
    std::string path;
    std::string content;
};

struct RunResult {
    TimeGrid grid;
    std::vector<Artifact> artifacts;
    nlohmann::json manifest;
};

/// Errors from the physics modules are rethrown with the bench line that
/// introduced the offending element.
RunResult run(const BenchProgram& p, unsigned threads = 1);

/// Writes every artifact, resolving relative paths against base_dir.
void write_artifacts(const RunResult& r, const std::string& base_dir);

}  // namespace biphoton::bench
