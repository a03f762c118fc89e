// Command-line driver for the partial theta library.
//
//   ptheta eval --q 0.5 --x 2,3
//   ptheta zeros --q 0.7 --format csv --output atlas.csv
//   ptheta spectrum --regime positive --j 1
//   ptheta lines --q 0.5 --nu 4
//   ptheta lemma --n 1:10
//   ptheta theorem --regime positive --grid 0.05:0.95:30
//   ptheta --from-report report.json
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage error,
// 3 library error, 4 replay differs from the stored report.

#include "ptheta/report.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ptheta;

cdouble parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse complex number '" + s + "' (use re or re,im)");
    }
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("bracket must have the form a:b");
    try {
        return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw ConfigError("bracket must have the form a:b");
    }
}

// "3" or "1:10" (inclusive range).
std::vector<int> parse_int_range(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) return {std::stoi(s)};
        const int a = std::stoi(s.substr(0, colon));
        const int b = std::stoi(s.substr(colon + 1));
        if (b < a) throw ConfigError("empty range '" + s + "'");
        std::vector<int> v;
        for (int i = a; i <= b; ++i) v.push_back(i);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse integer range '" + s + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

struct RawOptions {
    std::vector<double> q;
    std::string grid;
    std::vector<std::string> x;
    std::string regime = "positive";
    std::string bracket;
    double track_to = 0.0;
    std::vector<std::string> nu;
    std::vector<std::string> sides;
    std::vector<std::string> n;
    std::string format = "json";
};

void add_common(CLI::App* sub, RunConfig& c, RawOptions& raw) {
    sub->add_option("--eps", c.eps, "Truncation tolerance for theta");
    sub->add_option("--pairing-tol", c.pairing_tol, "Tolerance for matching conjugate zeros");
    sub->add_option("--bracket-tol", c.bracket_tol, "Width of the final spectral bracket");
    sub->add_option("--format", raw.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", c.output_path, "Output file (default: standard output)");
    sub->add_option("--parallel", c.parallelism, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for random sampling");
}

void add_q(CLI::App* sub, RawOptions& raw) {
    sub->add_option("--q", raw.q, "Base q (repeatable)");
    sub->add_option("--grid", raw.grid, "Grid of q values a:b:n");
}

int emit(const RunConfig& c, const RunResult& r) {
    const std::string path = resolve_output_path(c);
    const bool csv = c.format == OutputFormat::csv && r.exit_status == kExitOk;
    if (path.empty()) {
        std::cout << (csv ? r.csv : r.report);
    } else if (csv) {
        write_file(path, r.csv);
        write_file(std::filesystem::path(path).replace_extension(".json").string(), r.report);
    } else {
        write_file(path, r.report);
    }
    if (r.exit_status == kExitUsage || r.exit_status == kExitModuleError) {
        std::cerr << "ptheta: " << (r.exit_status == kExitUsage ? "usage error" : "error") << ", see the report\n";
    }
    return r.exit_status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial theta function: evaluation, zeros, spectral values and bound verification"};
    app.set_version_flag("--version", std::string(PTHETA_VERSION));
    app.require_subcommand(0, 1);

    RunConfig c;
    RawOptions raw;
    std::string from_report;
    app.add_option("--from-report", from_report, "Re-run the config stored in a report and compare");
    app.add_option("-o,--output", c.output_path, "Output file for --from-report");

    CLI::App* eval = app.add_subcommand("eval", "Evaluate theta, Theta* and G");
    add_q(eval, raw);
    eval->add_option("--x", raw.x, "Point x as re or re,im (repeatable)");
    eval->add_option("--random", c.random_samples, "Extra random points with 1.5 < |x| < 100");

    CLI::App* zeros = app.add_subcommand("zeros", "Zeros of theta(q, .) in a disk");
    add_q(zeros, raw);
    zeros->add_option("--k", c.k, "Disk |x| < |q|^(-k-1/2); default is the census disk");

    CLI::App* ccps = app.add_subcommand("ccps", "Complex conjugate pairs of zeros");
    add_q(ccps, raw);
    ccps->add_option("--k", c.k, "Disk |x| < |q|^(-k-1/2); default is the census disk");

    CLI::App* spectrum = app.add_subcommand("spectrum", "Locate a spectral value");
    spectrum->add_option("--regime", raw.regime, "Sign of q")->check(CLI::IsMember({"positive", "negative"}));
    spectrum->add_option("--j", c.j, "Index of the spectral value");
    spectrum->add_option("--bracket", raw.bracket, "Initial bracket a:b (default: scan)");
    CLI::Option* track = spectrum->add_option("--track-to", raw.track_to, "Follow the newborn pair up to this q");
    spectrum->add_option("--max-step", c.max_step, "Largest continuation step in q");

    CLI::App* lines = app.add_subcommand("lines", "Check zero-free lines");
    add_q(lines, raw);
    lines->add_option("--nu", raw.nu, "Line index or range a:b (default l_n..l_n+2)");
    lines->add_option("--side", raw.sides, "left or right (default: left, both for q < 0)")
        ->check(CLI::IsMember({"left", "right"}));
    lines->add_option("--im-range", c.im_range, "Largest |Im x| sampled");
    lines->add_option("--samples", c.line_samples, "Sample points per line");

    CLI::App* lemma = app.add_subcommand("lemma", "Replay the lower-bound inequality chains");
    lemma->add_option("--n", raw.n, "Interval index or range a:b (repeatable)");

    CLI::App* theorem = app.add_subcommand("theorem", "Containment sweep for the zero regions");
    add_q(theorem, raw);
    theorem->add_option("--regime", raw.regime, "Sign of q")->check(CLI::IsMember({"positive", "negative"}));
    theorem->add_option("--disk-margin", c.disk_k_margin, "Extra annuli beyond the census disk");
    theorem->add_option("--max-abs-q", c.max_abs_q, "Largest allowed |q| (up to 0.98)");

    for (CLI::App* sub : {eval, zeros, ccps, spectrum, lines, lemma, theorem}) add_common(sub, c, raw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!from_report.empty()) {
            if (!app.get_subcommands().empty()) throw ConfigError("--from-report takes no subcommand");
            const std::string stored = read_file(from_report);
            const RunConfig replay = config_from_report(stored);
            const RunResult r = run(replay);
            if (!c.output_path.empty()) write_file(c.output_path, r.report);
            if (r.report != stored) {
                std::cerr << "ptheta: replay differs from " << from_report << "\n";
                return kExitReplayMismatch;
            }
            std::cerr << "ptheta: replay identical\n";
            return r.exit_status;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return kExitUsage;
        }
        const CLI::App* sub = app.get_subcommands().front();
        c.command = command_from_string(sub->get_name());
        c.q_values = raw.q;
        if (!raw.grid.empty()) c.grid = GridSpec::parse(raw.grid);
        for (const std::string& x : raw.x) c.x_values.push_back(parse_complex(x));
        c.regime = regime_from_string(raw.regime);
        if (!raw.bracket.empty()) c.bracket = parse_pair(raw.bracket);
        if (track->count() > 0) c.track_to = raw.track_to;
        for (const std::string& s : raw.nu)
            for (int v : parse_int_range(s)) c.nu_values.push_back(v);
        for (const std::string& s : raw.sides) c.sides.push_back(s == "left" ? LineSide::left : LineSide::right);
        if (!raw.n.empty()) {
            c.n_values.clear();
            for (const std::string& s : raw.n)
                for (int v : parse_int_range(s)) c.n_values.push_back(v);
        }
        c.format = raw.format == "csv" ? OutputFormat::csv : OutputFormat::json;
        return emit(c, run(c));
    } catch (const ConfigError& e) {
        std::cerr << "ptheta: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "ptheta: " << e.what() << "\n";
        return kExitModuleError;
    }
}
