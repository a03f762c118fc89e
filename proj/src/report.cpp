#include "ptheta/report.hpp"

#include "ptheta/errors.hpp"
#include "ptheta/region.hpp"
#include "ptheta/spectrum.hpp"
#include "ptheta/zero_finder.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace ptheta {

using nlohmann::json;

namespace {

// Non-finite doubles are stored as strings so that reports stay valid JSON.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double to_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

json cplx(cdouble z) { return json::array({num(z.real()), num(z.imag())}); }
cdouble to_cplx(const json& j) { return {to_num(j.at(0)), to_num(j.at(1))}; }

struct Checks {
    json list = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, double margin) {
        list.push_back({{"name", name}, {"pass", pass}, {"margin", num(margin)}});
        all_pass = all_pass && pass;
    }
};

std::string fmt_q(double q) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", q);
    return buf;
}

ZeroFinderOptions finder_options(const RunConfig& c) {
    ZeroFinderOptions o;
    o.pairing_tol = c.pairing_tol;
    return o;
}

json zero_json(const Zero& z) {
    return {{"x", cplx(z.location)}, {"residual", num(z.residual)}, {"multiplicity", z.multiplicity},
            {"annulus_k", z.annulus_k}};
}

json run_eval(const RunConfig& c, Checks& checks) {
    std::vector<cdouble> xs = c.x_values;
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> log_r(std::log(1.5), std::log(100.0));
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < c.random_samples; ++i) xs.push_back(std::polar(std::exp(log_r(rng)), phase(rng)));

    json out = json::array();
    for (double qv : config_q_values(c)) {
        const QParam q = QParam::make(qv);
        for (cdouble x : xs) {
            const EvalOutput th = theta(q, x, c.eps);
            json e = {{"q", qv},
                      {"x", cplx(x)},
                      {"theta", cplx(th.value)},
                      {"tail_bound", num(th.tail_bound)},
                      {"rounding_bound", num(th.rounding_bound)},
                      {"terms_used", th.terms_used}};
            checks.add("theta tail bound q=" + fmt_q(qv), th.tail_bound <= c.eps, c.eps - th.tail_bound);
            if (x != cdouble{}) {
                const ThetaStarOutput ts = theta_star(q, x);
                e["theta_star"] = cplx(ts.eval.value);
                e["theta_star_bound"] = num(ts.eval.tail_bound + ts.eval.rounding_bound);
                e["factors"] = {{"Q", num(ts.factors.Q_val)},
                                {"P", cplx(ts.factors.P_val)},
                                {"R", cplx(ts.factors.R_val)},
                                {"truncation_m", ts.factors.truncation_m}};
            }
            if (std::abs(x) > 1.0) {
                const EvalOutput g = tail_g(q, x);
                const ThetaStarOutput ts = theta_star(q, x);
                const double diff = std::abs(th.value - (ts.eval.value - g.value));
                const double bound = th.tail_bound + th.rounding_bound + ts.eval.tail_bound + ts.eval.rounding_bound
                                     + g.tail_bound + g.rounding_bound;
                e["G"] = cplx(g.value);
                e["g_bound"] = num(g_bound(x));
                e["identity_residual"] = num(diff);
                e["identity_bound"] = num(bound);
                checks.add("theta = Theta* - G q=" + fmt_q(qv), diff <= bound, bound - diff);
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

json run_zeros(const RunConfig& c, Checks& checks, std::string& csv) {
    json out = json::array();
    std::ostringstream os;
    if (c.format == OutputFormat::csv) os << "q,re,im,multiplicity,annulus_k,residual\n";
    for (double qv : config_q_values(c)) {
        const QParam q = QParam::make(qv);
        const int k = c.k < 0 ? default_census_k(q) : c.k;
        const ZeroSet zs = find_zeros_in_disk(q, k, finder_options(c));
        json zeros = json::array();
        for (const Zero& z : zs.zeros) {
            zeros.push_back(zero_json(z));
            if (c.format == OutputFormat::csv) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d,%.17g\n", qv, z.location.real(),
                              z.location.imag(), z.multiplicity, z.annulus_k, z.residual);
                os << buf;
            }
        }
        out.push_back({{"q", qv},
                       {"disk_k", zs.disk_k},
                       {"disk_radius", num(zs.disk_radius)},
                       {"argument_count", zs.argument_count},
                       {"zeros", zeros}});
        checks.add("root count matches argument principle q=" + fmt_q(qv),
                   zs.multiplicity_sum() == zs.argument_count, 0.0);
    }
    csv = os.str();
    return out;
}

json run_ccps(const RunConfig& c, Checks& checks) {
    json out = json::array();
    for (double qv : config_q_values(c)) {
        const QParam q = QParam::make(qv);
        const int k = c.k < 0 ? default_census_k(q) : c.k;
        const ZeroClassification cl = classify_zeros(find_zeros_in_disk(q, k, finder_options(c)), c.pairing_tol);
        json pairs = json::array();
        for (const auto& [up, down] : cl.ccps) pairs.push_back(cplx(up.location));
        json reals = json::array();
        for (const Zero& z : cl.real_zeros) reals.push_back(num(z.location.real()));
        out.push_back({{"q", qv}, {"disk_k", k}, {"ccp_count", cl.ccps.size()}, {"ccps", pairs}, {"real_zeros", reals}});
        bool conj_ok = true;
        for (const auto& [up, down] : cl.ccps) conj_ok = conj_ok && up.location.imag() > 0.0;
        checks.add("zeros classified q=" + fmt_q(qv), conj_ok, 0.0);
    }
    return out;
}

json run_spectrum(const RunConfig& c, Checks& checks) {
    SpectrumOptions so;
    so.bracket_tol = c.bracket_tol;
    so.finder = finder_options(c);
    const auto bracket = c.bracket ? *c.bracket : scan_spectral_bracket(c.regime, c.j);
    const SpectralValue sv = find_spectral_value(c.regime, c.j, bracket, so);
    json out = {{"regime", to_string(sv.regime)},
                {"j", sv.index_j},
                {"q", sv.q_value},
                {"bracket", {sv.bracket.first, sv.bracket.second}},
                {"double_zero_x", sv.double_zero_x},
                {"ccps_before", sv.ccps_before},
                {"ccps_after", sv.ccps_after},
                {"coalescing_real_pair", {num(sv.coalescing_real_pair.first), num(sv.coalescing_real_pair.second)}},
                {"newborn_zero", cplx(sv.newborn_zero)},
                {"in_interval", sv.in_interval}};
    const auto [a, b] = double_zero_interval(c.regime);
    checks.add("one pair born in the final bracket", sv.ccps_after - sv.ccps_before == 1, 0.0);
    checks.add("double zero in [" + fmt_q(a) + ", " + fmt_q(b) + "]", sv.in_interval,
               std::min(sv.double_zero_x - a, b - sv.double_zero_x));
    if (c.track_to) {
        const CcpTrajectory t = track_ccp(sv, *c.track_to, c.max_step);
        json samples = json::array();
        for (const CcpSample& s : t.samples) {
            samples.push_back({{"q", s.q}, {"z", cplx(s.z)}, {"residual", num(s.residual)}});
        }
        out["trajectory"] = samples;
        checks.add("trajectory reaches q_end", !t.samples.empty() && t.samples.back().q == *c.track_to, 0.0);
    }
    return out;
}

json line_json(const LineCheckReport& r) {
    return {{"q", r.spec.q},
            {"nu", r.spec.nu},
            {"side", to_string(r.spec.side)},
            {"abscissa", num(r.spec.abscissa)},
            {"theta_star_at_axis", num(r.theta_star_at_axis)},
            {"g_bound_at_axis", num(r.g_bound_at_axis)},
            {"margin", num(r.margin)},
            {"sampled_min_gap", num(r.sampled_min_gap)},
            {"axis_is_minimum", r.axis_is_minimum},
            {"extended_precision_used", r.extended_precision_used},
            {"positive_counterpart", num(r.positive_counterpart)},
            {"cross_sign_ok", r.cross_sign_ok},
            {"pass", r.pass}};
}

json run_lines(const RunConfig& c, Checks& checks) {
    json out = json::array();
    for (double qv : config_q_values(c)) {
        const QParam q = QParam::make(qv);
        std::vector<int> nus = c.nu_values;
        if (nus.empty()) {
            const int l = first_line_index(q.regime(), q.n());
            nus = {l, l + 1, l + 2};
        }
        std::vector<LineSide> sides = c.sides;
        if (sides.empty()) sides = q.value() < 0.0 ? std::vector{LineSide::left, LineSide::right}
                                                   : std::vector{LineSide::left};
        for (int nu : nus) {
            for (LineSide side : sides) {
                const LineCheckReport r =
                    check_line(make_line_spec(q, nu, side, c.nu_values.empty()), c.im_range, c.line_samples);
                out.push_back(line_json(r));
                checks.add("line q=" + fmt_q(qv) + " nu=" + std::to_string(nu) + " " + to_string(side), r.pass,
                           std::min(r.margin, r.sampled_min_gap));
            }
        }
    }
    return out;
}

json link_json(const ChainLink& l) {
    return {{"label", l.label}, {"lhs", num(l.lhs)}, {"relation", l.relation}, {"rhs", num(l.rhs)}, {"holds", l.holds}};
}

json run_lemma(const RunConfig& c, Checks& checks) {
    json chains = json::array();
    for (int n : c.n_values) {
        const Lemma1Report r = lemma1_chain(n);
        json links = json::array();
        for (const ChainLink& l : r.chain_values) links.push_back(link_json(l));
        chains.push_back({{"n", r.n},
                          {"q_corner", r.q_corner},
                          {"nu", r.nu},
                          {"Q_lower", num(r.Q_lower)},
                          {"P_dagger", num(r.P_dagger)},
                          {"P_flat_or_sharp", num(r.P_flat_or_sharp)},
                          {"product_lower", num(r.product_lower)},
                          {"theta_star_lower", num(r.theta_star_lower)},
                          {"g_upper", num(r.g_upper)},
                          {"theta_star_actual", num(r.theta_star_actual)},
                          {"links", links},
                          {"failing_link", r.failing_link},
                          {"pass", r.pass}});
        checks.add("lemma chain n=" + std::to_string(n) + (r.pass ? "" : " (" + r.failing_link + ")"), r.pass,
                   r.theta_star_lower - r.g_upper);
    }
    json facts = json::array();
    for (const ChainLink& l : sequence_facts()) {
        facts.push_back(link_json(l));
        checks.add(l.label, l.holds, 0.0);
    }
    json gammas = json::object();
    for (int n = 6; n <= 13; ++n) gammas[std::to_string(n)] = gamma_n(n);
    json bs = json::object();
    for (int n = 2; n <= 5; ++n) bs[std::to_string(n)] = b_n(n);
    return {{"chains", chains}, {"sequence_facts", facts}, {"gamma", gammas}, {"b", bs}};
}

json run_theorem(const RunConfig& c, Checks& checks) {
    const RegionKind kind = c.regime == Regime::positive ? RegionKind::positive_q : RegionKind::negative_q;
    ContainmentOptions o;
    o.max_abs_q = c.max_abs_q;
    o.parallelism = c.parallelism;
    o.finder = finder_options(c);
    const RegionReport r = verify_containment(kind, config_q_values(c), c.disk_k_margin, o);
    const RegionSpec region = theorem_region(kind);

    json samples = json::array();
    double min_dist = std::numeric_limits<double>::infinity();
    for (const RegionSample& s : r.samples) {
        json pairs = json::array();
        for (cdouble z : s.ccps) {
            pairs.push_back(cplx(z));
            min_dist = std::min(min_dist, region.signed_distance(z));
        }
        samples.push_back({{"q", s.q},
                           {"disk_k", s.disk_k},
                           {"disk_radius", num(s.disk_radius)},
                           {"real_zero_count", s.real_zeros.size()},
                           {"ccps", pairs},
                           {"error", s.error}});
    }
    const auto viol_json = [](const std::vector<RegionViolation>& v) {
        json a = json::array();
        for (const RegionViolation& e : v) a.push_back({{"q", e.q}, {"zero", cplx(e.zero)}, {"reason", e.reason}});
        return a;
    };
    checks.add("CCPs inside the theorem region", r.pass, min_dist);
    return {{"regime", to_string(c.regime)},
            {"total_ccps", r.total_ccps},
            {"violations", viol_json(r.violations)},
            {"boundary_grazing", viol_json(r.boundary_grazing)},
            {"max_re_magnitude_seen", num(r.max_re_magnitude_seen)},
            {"max_im_seen", num(r.max_im_seen)},
            {"samples", samples},
            {"pass", r.pass}};
}

json config_json(const RunConfig& c) {
    json j;
    j["command"] = to_string(c.command);
    json qs = json::array();
    for (double q : c.q_values) qs.push_back(q);
    j["q_values"] = qs;
    j["grid"] = c.grid ? json{{"a", c.grid->a}, {"b", c.grid->b}, {"n", c.grid->n}} : json(nullptr);
    json xs = json::array();
    for (cdouble x : c.x_values) xs.push_back(cplx(x));
    j["x_values"] = xs;
    j["random_samples"] = c.random_samples;
    j["k"] = c.k;
    j["regime"] = to_string(c.regime);
    j["j"] = c.j;
    j["bracket"] = c.bracket ? json{c.bracket->first, c.bracket->second} : json(nullptr);
    j["track_to"] = c.track_to ? json(*c.track_to) : json(nullptr);
    j["max_step"] = c.max_step;
    j["nu_values"] = c.nu_values;
    json sides = json::array();
    for (LineSide s : c.sides) sides.push_back(to_string(s));
    j["sides"] = sides;
    j["im_range"] = c.im_range;
    j["line_samples"] = c.line_samples;
    j["n_values"] = c.n_values;
    j["disk_k_margin"] = c.disk_k_margin;
    j["max_abs_q"] = c.max_abs_q;
    j["eps"] = c.eps;
    j["pairing_tol"] = c.pairing_tol;
    j["bracket_tol"] = c.bracket_tol;
    j["format"] = c.format == OutputFormat::json ? "json" : "csv";
    j["output_path"] = c.output_path;
    j["parallelism"] = c.parallelism;
    j["seed"] = c.seed;
    return j;
}

RunConfig config_from(const json& j) {
    RunConfig c;
    c.command = command_from_string(j.at("command").get<std::string>());
    c.q_values = j.at("q_values").get<std::vector<double>>();
    if (!j.at("grid").is_null())
        c.grid = GridSpec{j["grid"].at("a").get<double>(), j["grid"].at("b").get<double>(), j["grid"].at("n").get<int>()};
    for (const json& x : j.at("x_values")) c.x_values.push_back(to_cplx(x));
    c.random_samples = j.at("random_samples").get<int>();
    c.k = j.at("k").get<int>();
    c.regime = regime_from_string(j.at("regime").get<std::string>());
    c.j = j.at("j").get<int>();
    if (!j.at("bracket").is_null()) c.bracket = std::pair{j["bracket"].at(0).get<double>(), j["bracket"].at(1).get<double>()};
    if (!j.at("track_to").is_null()) c.track_to = j["track_to"].get<double>();
    c.max_step = j.at("max_step").get<double>();
    c.nu_values = j.at("nu_values").get<std::vector<int>>();
    for (const json& s : j.at("sides")) {
        const std::string v = s.get<std::string>();
        if (v != "left" && v != "right") throw ConfigError("unknown line side: " + v);
        c.sides.push_back(v == "left" ? LineSide::left : LineSide::right);
    }
    c.im_range = j.at("im_range").get<double>();
    c.line_samples = j.at("line_samples").get<int>();
    c.n_values = j.at("n_values").get<std::vector<int>>();
    c.disk_k_margin = j.at("disk_k_margin").get<int>();
    c.max_abs_q = j.at("max_abs_q").get<double>();
    c.eps = j.at("eps").get<double>();
    c.pairing_tol = j.at("pairing_tol").get<double>();
    c.bracket_tol = j.at("bracket_tol").get<double>();
    const std::string f = j.at("format").get<std::string>();
    if (f != "json" && f != "csv") throw ConfigError("unknown format: " + f);
    c.format = f == "json" ? OutputFormat::json : OutputFormat::csv;
    c.output_path = j.at("output_path").get<std::string>();
    c.parallelism = j.at("parallelism").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::eval: return "eval";
    case Command::zeros: return "zeros";
    case Command::ccps: return "ccps";
    case Command::spectrum: return "spectrum";
    case Command::lines: return "lines";
    case Command::lemma: return "lemma";
    case Command::theorem: return "theorem";
    }
    return "eval";
}

Command command_from_string(const std::string& s) {
    for (Command c : {Command::eval, Command::zeros, Command::ccps, Command::spectrum, Command::lines, Command::lemma,
                      Command::theorem})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown command: " + s);
}

std::vector<double> GridSpec::points() const {
    if (n == 1) return {a};
    std::vector<double> p;
    for (int i = 0; i < n; ++i) p.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
    return p;
}

GridSpec GridSpec::parse(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("grid must have the form a:b:n, got '" + s + "'");
    try {
        std::size_t used = 0;
        GridSpec g;
        g.a = std::stod(s.substr(0, c1));
        g.b = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        const std::string ns = s.substr(c2 + 1);
        g.n = std::stoi(ns, &used);
        if (used != ns.size() || g.n < 1) throw ConfigError("grid size must be a positive integer");
        return g;
    } catch (const std::logic_error&) {
        throw ConfigError("grid must have the form a:b:n, got '" + s + "'");
    }
}

std::vector<double> config_q_values(const RunConfig& c) {
    std::vector<double> q = c.q_values;
    if (c.grid) {
        const std::vector<double> g = c.grid->points();
        q.insert(q.end(), g.begin(), g.end());
    }
    return q;
}

void validate(const RunConfig& c) {
    if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
    if (!(c.pairing_tol > 0.0)) throw ConfigError("pairing tolerance must be positive");
    if (!(c.bracket_tol > 0.0)) throw ConfigError("bracket tolerance must be positive");
    if (!(c.max_step > 0.0)) throw ConfigError("max step must be positive");
    if (!(c.im_range > 0.0)) throw ConfigError("im range must be positive");
    if (c.line_samples < 64) throw ConfigError("line samples must be >= 64");
    if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (c.random_samples < 0) throw ConfigError("random samples must be >= 0");
    if (c.disk_k_margin < 0) throw ConfigError("disk margin must be >= 0");
    if (!(c.max_abs_q > 0.0 && c.max_abs_q <= constants::kMaxAbsQ)) throw ConfigError("max |q| must lie in (0, 0.98]");
    if (c.format == OutputFormat::csv && c.command != Command::zeros)
        throw ConfigError("csv output is only available for the zeros command");
    for (double q : config_q_values(c)) {
        if (!(std::abs(q) >= constants::kMinAbsQ && std::abs(q) <= constants::kMaxAbsQ + 1e-12))
            throw ConfigError("q = " + fmt_q(q) + " outside the supported range 1e-6 <= |q| <= 0.98");
    }
    const bool needs_q = c.command == Command::eval || c.command == Command::zeros || c.command == Command::ccps
                         || c.command == Command::lines || c.command == Command::theorem;
    if (needs_q && config_q_values(c).empty()) throw ConfigError("no q values given (use --q or --grid)");
    if (c.command == Command::eval && c.x_values.empty() && c.random_samples == 0)
        throw ConfigError("eval needs --x or --random");
    if (c.command == Command::spectrum && c.j < 1) throw ConfigError("spectral index j must be >= 1");
    if (c.command == Command::lemma) {
        if (c.n_values.empty()) throw ConfigError("lemma needs at least one n");
        for (int n : c.n_values)
            if (n < 1) throw ConfigError("lemma index n must be >= 1");
    }
    for (int nu : c.nu_values)
        if (nu < 1) throw ConfigError("line index nu must be >= 1");
}

std::string config_to_json(const RunConfig& c) { return config_json(c).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text) {
    try {
        return config_from(json::parse(text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

RunConfig config_from_report(const std::string& report_text) {
    try {
        return config_from(json::parse(report_text).at("config"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

RunResult run(const RunConfig& config) {
    RunResult res;
    json report;
    report["config"] = config_json(config);
    report["version"] = PTHETA_VERSION;
    Checks checks;
    try {
        validate(config);
        json results;
        switch (config.command) {
        case Command::eval: results = run_eval(config, checks); break;
        case Command::zeros: results = run_zeros(config, checks, res.csv); break;
        case Command::ccps: results = run_ccps(config, checks); break;
        case Command::spectrum: results = run_spectrum(config, checks); break;
        case Command::lines: results = run_lines(config, checks); break;
        case Command::lemma: results = run_lemma(config, checks); break;
        case Command::theorem: results = run_theorem(config, checks); break;
        }
        report["results"] = std::move(results);
        res.exit_status = checks.all_pass ? kExitOk : kExitChecksFailed;
    } catch (const ConfigError& e) {
        report["results"] = nullptr;
        report["error"] = {{"kind", "usage"}, {"message", e.what()}};
        res.exit_status = kExitUsage;
    } catch (const std::exception& e) {
        report["results"] = nullptr;
        report["error"] = {{"kind", "module"}, {"message", e.what()}};
        res.exit_status = kExitModuleError;
    }
    report["checks"] = checks.list;
    res.report = report.dump(2) + "\n";
    return res;
}

std::string resolve_output_path(const RunConfig& c) {
    const char* dir = std::getenv("PTHETA_OUTPUT_DIR");
    const bool has_dir = dir != nullptr && *dir != '\0';
    if (c.output_path.empty()) {
        if (!has_dir) return {};
        return (std::filesystem::path(dir) / (to_string(c.command) + (c.format == OutputFormat::csv ? ".csv" : ".json")))
            .string();
    }
    const std::filesystem::path p(c.output_path);
    if (p.is_absolute() || !has_dir) return p.string();
    return (std::filesystem::path(dir) / p).string();
}

} // namespace ptheta
