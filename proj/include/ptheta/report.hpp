#pragma once

#include "ptheta/bounds.hpp"
#include "ptheta/qparam.hpp"
#include "ptheta/theta_eval.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptheta {

enum class Command { eval, zeros, ccps, spectrum, lines, lemma, theorem };
enum class OutputFormat { json, csv };

[[nodiscard]] std::string to_string(Command c);
[[nodiscard]] Command command_from_string(const std::string& s);

/// Raised for configurations that fail validation (usage errors).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inclusive grid "a:b:n" of n equally spaced points.
struct GridSpec {
    double a = 0.0;
    double b = 0.0;
    int n = 0;

    [[nodiscard]] std::vector<double> points() const;
    [[nodiscard]] static GridSpec parse(const std::string& s);
};

struct RunConfig {
    Command command = Command::eval;
    std::vector<double> q_values;
    std::optional<GridSpec> grid;
    std::vector<cdouble> x_values;       // eval
    int random_samples = 0;              // eval: extra random x with 1.5 < |x| < 100
    int k = -1;                          // zeros / ccps; < 0 selects the census disk
    Regime regime = Regime::positive;    // spectrum / theorem
    int j = 1;                           // spectrum
    std::optional<std::pair<double, double>> bracket;
    std::optional<double> track_to;      // spectrum: follow the newborn pair up to this q
    double max_step = 1e-2;
    std::vector<int> nu_values;          // lines; empty selects l_n, l_n + 1, l_n + 2
    std::vector<LineSide> sides;         // lines; empty selects left (and right for q < 0)
    double im_range = 200.0;
    int line_samples = 256;
    std::vector<int> n_values{1};        // lemma
    int disk_k_margin = 1;               // theorem
    double max_abs_q = 0.95;             // theorem
    double eps = 1e-15;
    double pairing_tol = 1e-8;
    double bracket_tol = 1e-6;
    OutputFormat format = OutputFormat::json;
    std::string output_path;             // empty: standard output
    int parallelism = 1;
    std::uint64_t seed = 1;
};

/// All q values of the run: explicit values followed by the grid points.
[[nodiscard]] std::vector<double> config_q_values(const RunConfig& c);

/// Throws ConfigError for invalid settings.
void validate(const RunConfig& c);

[[nodiscard]] std::string config_to_json(const RunConfig& c);
[[nodiscard]] RunConfig config_from_json(const std::string& text);
/// Extracts the embedded config of a report produced by run().
[[nodiscard]] RunConfig config_from_report(const std::string& report_text);

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitModuleError = 3;
inline constexpr int kExitReplayMismatch = 4;

struct RunResult {
    std::string report; // JSON text, newline-terminated
    std::string csv;    // zero atlas when format == csv (zeros command only)
    int exit_status = kExitOk;
};

/// Dispatches the command and assembles the report
/// {"config", "results", "checks": [{name, pass, margin}], "version"}
/// (plus "error" when a module throws). Deterministic for a fixed config.
[[nodiscard]] RunResult run(const RunConfig& config);

/// Output location: `path` itself if absolute, otherwise placed under
/// $PTHETA_OUTPUT_DIR when that variable is set. An empty path with the
/// variable set becomes "<command>.<json|csv>" there; otherwise it stays empty.
[[nodiscard]] std::string resolve_output_path(const RunConfig& c);

} // namespace ptheta
