// Python bindings for the main operations.

#include "ptheta/bounds.hpp"
#include "ptheta/errors.hpp"
#include "ptheta/region.hpp"
#include "ptheta/report.hpp"
#include "ptheta/spectrum.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zero_finder.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ptheta;
using namespace pybind11::literals;

namespace {

Regime regime_arg(const std::string& s) { return regime_from_string(s); }

py::dict eval_dict(const EvalOutput& e) {
    return py::dict("value"_a = e.value, "tail_bound"_a = e.tail_bound, "terms_used"_a = e.terms_used,
                    "rounding_bound"_a = e.rounding_bound);
}

py::dict zero_dict(const Zero& z) {
    return py::dict("location"_a = z.location, "residual"_a = z.residual, "multiplicity"_a = z.multiplicity,
                    "annulus_k"_a = z.annulus_k);
}

py::list links(const std::vector<ChainLink>& v) {
    py::list out;
    for (const ChainLink& l : v)
        out.append(py::dict("label"_a = l.label, "lhs"_a = l.lhs, "rhs"_a = l.rhs, "relation"_a = l.relation,
                            "holds"_a = l.holds));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Partial theta function: evaluation, zeros, spectrum and bound checks";
    m.attr("__version__") = PTHETA_VERSION;
    m.attr("FIRST_POSITIVE_SPECTRAL") = constants::kFirstPositiveSpectral;
    m.attr("FIRST_NEGATIVE_SPECTRAL") = constants::kFirstNegativeSpectral;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_OverflowError);
    py::register_exception<PrecisionBudgetExceeded>(m, "PrecisionBudgetExceeded", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<CountMismatch>(m, "CountMismatch", PyExc_RuntimeError);

    m.def(
        "theta", [](double q, cdouble x, double eps) { return eval_dict(theta(QParam::make(q), x, eps)); }, "q"_a,
        "x"_a, "eps"_a = 1e-15, "Partial theta function by direct summation.");
    m.def(
        "theta_star",
        [](double q, cdouble x) {
            const ThetaStarOutput t = theta_star(QParam::make(q), x);
            py::dict d = eval_dict(t.eval);
            d["Q"] = t.factors.Q_val;
            d["P"] = t.factors.P_val;
            d["R"] = t.factors.R_val;
            return d;
        },
        "q"_a, "x"_a, "Jacobi triple product Theta*(q, x).");
    m.def(
        "tail_g", [](double q, cdouble x) { return eval_dict(tail_g(QParam::make(q), x)); }, "q"_a, "x"_a,
        "G(q, x) = Theta*(q, x) - theta(q, x) for |x| > 1.");
    m.def("g_bound", &g_bound, "x"_a);

    m.def(
        "find_zeros",
        [](double q, int k) {
            const ZeroSet zs = find_zeros_in_disk(QParam::make(q), k);
            py::list zeros;
            for (const Zero& z : zs.zeros) zeros.append(zero_dict(z));
            return py::dict("q"_a = zs.q, "disk_k"_a = zs.disk_k, "disk_radius"_a = zs.disk_radius, "zeros"_a = zeros,
                            "argument_count"_a = zs.argument_count);
        },
        "q"_a, "k"_a, "Zeros of theta(q, .) inside the disk of index k.");
    m.def(
        "count_ccps", [](double q) { return count_ccps(QParam::make(q)); }, "q"_a,
        "Number of complex conjugate pairs of zeros.");
    m.def(
        "spectral_value",
        [](const std::string& regime, int j, std::pair<double, double> bracket) {
            const SpectralValue s = find_spectral_value(regime_arg(regime), j, bracket);
            return py::dict("j"_a = s.index_j, "q"_a = s.q_value, "bracket"_a = s.bracket,
                            "double_zero_x"_a = s.double_zero_x, "ccps_before"_a = s.ccps_before,
                            "ccps_after"_a = s.ccps_after, "in_interval"_a = s.in_interval);
        },
        "regime"_a, "j"_a, "bracket"_a);

    m.def(
        "line_abscissa", [](double q, int nu) { return line_abscissa(QParam::make(q), nu); }, "q"_a, "nu"_a);
    m.def(
        "check_line",
        [](double q, int nu, const std::string& side, double im_range, int samples) {
            const LineSide s = side == "right" ? LineSide::right : LineSide::left;
            const LineCheckReport r = check_line(make_line_spec(QParam::make(q), nu, s, false), im_range, samples);
            return py::dict("abscissa"_a = r.spec.abscissa, "theta_star_at_axis"_a = r.theta_star_at_axis,
                            "g_bound_at_axis"_a = r.g_bound_at_axis, "margin"_a = r.margin,
                            "sampled_min_gap"_a = r.sampled_min_gap, "axis_is_minimum"_a = r.axis_is_minimum,
                            "pass"_a = r.pass);
        },
        "q"_a, "nu"_a, "side"_a = "left", "im_range"_a = 200.0, "samples"_a = 256,
        "Checks that |Theta*| exceeds the bound on G along the vertical line Re x = -|q|^(-nu-1/2).");
    m.def(
        "lemma_chain",
        [](int n) {
            const Lemma1Report r = lemma1_chain(n);
            return py::dict("n"_a = r.n, "q_corner"_a = r.q_corner, "nu"_a = r.nu, "Q_lower"_a = r.Q_lower,
                            "P_dagger"_a = r.P_dagger, "P_flat_or_sharp"_a = r.P_flat_or_sharp,
                            "product_lower"_a = r.product_lower, "theta_star_lower"_a = r.theta_star_lower,
                            "g_upper"_a = r.g_upper, "theta_star_actual"_a = r.theta_star_actual,
                            "links"_a = links(r.chain_values), "pass"_a = r.pass);
        },
        "n"_a);
    m.def("gamma_n", &gamma_n, "n"_a);
    m.def("b_n", &b_n, "n"_a);

    m.def(
        "verify_containment",
        [](const std::string& kind, const std::vector<double>& grid, int parallelism) {
            ContainmentOptions o;
            o.parallelism = parallelism;
            const RegionReport r = verify_containment(region_kind_from_string(kind), grid, 1, o);
            py::list violations;
            for (const RegionViolation& v : r.violations)
                violations.append(py::dict("q"_a = v.q, "zero"_a = v.zero, "reason"_a = v.reason));
            return py::dict("total_ccps"_a = r.total_ccps, "violations"_a = violations,
                            "max_re_magnitude_seen"_a = r.max_re_magnitude_seen, "max_im_seen"_a = r.max_im_seen,
                            "pass"_a = r.pass);
        },
        "kind"_a, "grid"_a, "parallelism"_a = 1);

    m.def(
        "default_config",
        [](const std::string& command) {
            RunConfig c;
            c.command = command_from_string(command);
            return config_to_json(c);
        },
        "command"_a, "Default configuration (JSON) for a CLI command.");
    m.def(
        "run_config",
        [](const std::string& config_json) {
            const RunResult r = run(config_from_json(config_json));
            return py::make_tuple(r.exit_status, r.report, r.csv);
        },
        "config_json"_a, "Runs a CLI configuration (JSON) and returns (exit_status, report_json, csv).");
}
