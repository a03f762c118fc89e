#include "ptheta/bounds.hpp"

#include "ptheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptheta {

namespace {

constexpr double kAlpha0 = 0.27566444771089604; // sqrt(3) / (2 pi)
constexpr double kRelTol = 1e-12;

double log_q_product(double q) {
    double s = 0.0;
    double pw = q;
    while (std::abs(pw) > 1e-18) {
        s += std::log1p(-pw);
        pw *= q;
    }
    return s;
}

// log prod_{j>=1} (1 - q^{j-1/2}), q in (0, 1).
double log_p_dagger(double q) {
    double s = 0.0;
    double pw = std::sqrt(q);
    while (pw > 1e-18) {
        s += std::log1p(-pw);
        pw *= q;
    }
    return s;
}

// log prod_{m=1}^{nu} (1 - q^{nu+1/2-m}) = first nu factors of P_dagger.
double log_p_sharp(double q, int nu) {
    double s = 0.0;
    for (int m = 1; m <= nu; ++m) s += std::log1p(-std::pow(q, nu + 0.5 - m));
    return s;
}

// log |prod_{m>=1} (1 + x q^m)| and log |prod_{m>=1} (1 + q^{m-1}/x)| for real q.
double log_p_abs(double q, cdouble x) {
    double s = 0.0;
    double pw = q;
    while (std::abs(pw) * (1.0 + std::abs(x)) > 1e-18) {
        s += std::log(std::abs(1.0 + x * pw));
        pw *= q;
    }
    return s;
}

double log_r_abs(double q, cdouble x) {
    double s = 0.0;
    double pw = 1.0;
    while (std::abs(pw) / std::abs(x) > 1e-18) {
        s += std::log(std::abs(1.0 + pw / x));
        pw *= q;
    }
    return s;
}

double log_theta_star_abs(double q, cdouble x) {
    return ThetaFunction(QParam::make(q)).theta_star_with_log_derivative(x).first.log_abs();
}

double exp_capped(double l) { return l > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(l); }

// Round to `digits` significant digits toward -inf / +inf.
double floor_sig(double v, int digits) {
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::floor(v * scale) / scale;
}

class Chain {
public:
    void add_log(std::string label, double log_lhs, const std::string& rel, double log_rhs) {
        const double tol = kRelTol * std::max({1.0, std::abs(log_lhs), std::abs(log_rhs)});
        links_.push_back({std::move(label), exp_capped(log_lhs), exp_capped(log_rhs), rel,
                          compare(log_lhs, rel, log_rhs, tol)});
    }
    void add(std::string label, double lhs, const std::string& rel, double rhs) {
        const double tol = kRelTol * std::max(std::abs(lhs), std::abs(rhs));
        links_.push_back({std::move(label), lhs, rhs, rel, compare(lhs, rel, rhs, tol)});
    }
    [[nodiscard]] std::vector<ChainLink> take() { return std::move(links_); }

private:
    static bool compare(double a, const std::string& rel, double b, double tol) {
        if (!std::isfinite(a) && !std::isfinite(b)) return false;
        if (rel == ">") return a > b;
        if (rel == "<") return a < b;
        if (rel == ">=") return a >= b - tol;
        if (rel == "<=") return a <= b + tol;
        return std::abs(a - b) <= tol;
    }
    std::vector<ChainLink> links_;
};

std::vector<double> k_grid(int n, int points) {
    const double lo = constants::kFirstPositiveSpectral;
    const double hi = interval_outer_end(Regime::positive, n);
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

void finish(Lemma1Report& r, std::vector<ChainLink> links) {
    r.chain_values = std::move(links);
    r.pass = true;
    for (const ChainLink& l : r.chain_values) {
        if (!l.holds) {
            r.pass = false;
            r.failing_link = l.label;
            break;
        }
    }
}

Lemma1Report lemma1_first_interval() {
    Lemma1Report r;
    r.n = 1;
    r.q_corner = 0.5;
    r.nu = 4;
    const double q = 0.5;
    const cdouble x(-std::pow(2.0, 4.5), 0.0);

    const double lq = log_q_product(q);
    const double p_flat = (1 - std::pow(q, -3.5)) * (1 - std::pow(q, -2.5)) * (1 - std::pow(q, -1.5))
                          * (1 - std::pow(q, -0.5));
    const double lpd = log_p_dagger(q);
    r.Q_lower = std::exp(lq);
    r.P_dagger = std::exp(lpd);
    r.P_flat_or_sharp = p_flat;

    // Lower bounds truncated to three significant digits, as they are chained.
    const double q_trunc = floor_sig(r.Q_lower, 3);
    const double product_trunc = floor_sig(floor_sig(p_flat, 3) * floor_sig(r.P_dagger, 3), 3);
    r.product_lower = product_trunc;
    r.theta_star_lower = product_trunc * q_trunc * q_trunc;
    r.g_upper = 1.0 / (std::pow(2.0, 4.5) - 1.0);
    const double log_star = log_theta_star_abs(q, x);
    r.theta_star_actual = std::exp(log_star);

    Chain c;
    double min_q = std::numeric_limits<double>::infinity();
    double min_flat = min_q, min_dagger = min_q, min_r_over_q = min_q, min_star = min_q;
    double max_g = 0.0;
    for (double qq : k_grid(1, 41)) {
        min_q = std::min(min_q, log_q_product(qq));
        min_flat = std::min(min_flat, (1 - std::pow(qq, -3.5)) * (1 - std::pow(qq, -2.5)) * (1 - std::pow(qq, -1.5))
                                          * (1 - std::pow(qq, -0.5)));
        min_dagger = std::min(min_dagger, log_p_dagger(qq));
        for (int nu = 4; nu <= 8; ++nu) {
            const cdouble xx(-std::pow(qq, -nu - 0.5), 0.0);
            min_r_over_q = std::min(min_r_over_q, log_r_abs(qq, xx) - log_q_product(qq));
            min_star = std::min(min_star, log_theta_star_abs(qq, xx));
            max_g = std::max(max_g, 1.0 / (std::pow(qq, -nu - 0.5) - 1.0));
        }
    }
    c.add_log("Q(q) >= Q(1/2) on K_1", min_q, ">=", lq);
    c.add("Q(1/2) >= 0.288", r.Q_lower, ">=", q_trunc);
    c.add_log("R > Q on the lines L_nu, nu >= 4, q in K_1", min_r_over_q, ">", 0.0);
    c.add("P_flat(q) >= P_flat(1/2) on K_1", min_flat, ">=", p_flat);
    c.add_log("P_dagger(q) >= P_dagger(1/2) on K_1", min_dagger, ">=", lpd);
    for (int nu = 4; nu <= 8; ++nu) {
        const cdouble xx(-std::pow(q, -nu - 0.5), 0.0);
        c.add_log("|P_bullet| >= P_flat P_dagger at q = 1/2, nu = " + std::to_string(nu), log_p_abs(q, xx), ">=",
                  std::log(p_flat) + lpd);
    }
    c.add("P_flat P_dagger > 4.68", p_flat * r.P_dagger, ">", product_trunc);
    c.add("|Theta*| > 4.68 * 0.288^2 at q = 1/2, nu = 4", r.theta_star_actual, ">", r.theta_star_lower);
    c.add_log("|Theta*| > 4.68 * 0.288^2 on K_1, nu = 4..8", min_star, ">", std::log(r.theta_star_lower));
    c.add("1/(|x| - 1) maximal at q = 1/2, nu = 4 on K_1", max_g, "<=", r.g_upper);
    c.add("|G| <= 1/(|x| - 1) at q = 1/2, nu = 4", std::abs(tail_g(QParam::make(q), x).value), "<=", r.g_upper);
    c.add("G majorant < Theta* lower bound", r.g_upper, "<", r.theta_star_lower);
    finish(r, c.take());
    return r;
}

Lemma1Report lemma1_general(int n) {
    Lemma1Report r;
    r.n = n;
    const double np1 = n + 1.0;
    const double h = 1.0 - 1.0 / np1;
    const int nu = 4 * (n + 1);
    r.q_corner = h;
    r.nu = nu;
    const cdouble x(-std::pow(h, -nu - 0.5), 0.0);

    const double lq = log_q_product(h);
    const double lq_lower = -(std::numbers::pi * std::numbers::pi / 6.0) * n;
    const double lp = log_p_abs(h, x);
    const double lr = log_r_abs(h, x);
    const double lpd = log_p_dagger(h);
    const double lps = log_p_sharp(h, nu);
    const double l_qpow = -0.5 * nu * nu * std::log(h); // log q^{-nu^2/2}
    double lp_tri = 0.0;
    for (int m = 1; m <= nu; ++m) lp_tri += std::log(std::abs(1.0 - std::pow(h, -nu - 0.5 + m)));
    const double l_one_minus_sqrt = std::log1p(-std::sqrt(h));
    const double tau = std::pow(1.0 - std::sqrt(h), 2);
    const double l_fstar = -np1 * std::log1p(-1.0 / np1); // log f*(n+1)
    const double l_star = log_theta_star_abs(h, x);
    const double l_lower = n + 8.0 - std::log(4.0 * np1 * np1);

    r.Q_lower = std::exp(lq_lower);
    r.P_dagger = std::exp(lpd);
    r.P_flat_or_sharp = std::exp(lps);
    r.theta_star_lower = std::exp(l_lower);
    r.g_upper = 1.0 / (std::exp(4.0) - 1.0);
    r.theta_star_actual = exp_capped(l_star);

    Chain c;
    c.add_log("Q >= e^{-(pi^2/6) n} at the corner", lq, ">=", lq_lower);
    double min_q = std::numeric_limits<double>::infinity();
    for (double qq : k_grid(n, 41)) min_q = std::min(min_q, log_q_product(qq));
    c.add_log("Q >= e^{-(pi^2/6) n} on K_n", min_q, ">=", lq_lower);
    c.add_log("R > Q", lr, ">", lq);
    c.add_log("|Theta*| = Q |P| R", l_star, "==", lq + lp + lr);
    c.add_log("|Theta*| > Q^2 |P|", l_star, ">", 2 * lq + lp);
    c.add_log("|P| = |P_triangle| P_dagger", lp, "==", lp_tri + lpd);
    c.add_log("|P_triangle| = q^{-nu^2/2} P_sharp", lp_tri, "==", l_qpow + lps);
    c.add_log("P_sharp > P_dagger", lps, ">", lpd);
    c.add_log("P_dagger > (1 - sqrt q) Q", lpd, ">", l_one_minus_sqrt + lq);
    for (int extra = 1; extra <= 10; ++extra) {
        const double lps2 = log_p_sharp(h, nu + extra);
        c.add_log("P_sharp > P_dagger > (1 - sqrt q) Q at nu = l_n + " + std::to_string(extra),
                  std::min(lps2 - lpd, lpd - l_one_minus_sqrt - lq), ">", 0.0);
    }
    c.add_log("Q^2 |P| > Q^2 P_dagger^2 q^{-nu^2/2}", 2 * lq + lp, ">", 2 * lq + 2 * lpd + l_qpow);
    c.add_log("Q^2 P_dagger^2 q^{-nu^2/2} > Q^4 (1 - sqrt q)^2 q^{-nu^2/2}", 2 * lq + 2 * lpd + l_qpow, ">",
              4 * lq + 2 * l_one_minus_sqrt + l_qpow);
    c.add("tau = (1 - sqrt h)^2", tau, "==", std::pow((1.0 / np1) / (1.0 + std::sqrt(h)), 2));
    c.add("tau > 1/(4 (n+1)^2)", tau, ">", 1.0 / (4.0 * np1 * np1));
    c.add_log("q^{-nu^2/2} >= f*(n+1)^{8(n+1)}", l_qpow, ">=", 8.0 * np1 * l_fstar);
    c.add_log("f*(n+1)^{8(n+1)} > e^{8(n+1)}", 8.0 * np1 * l_fstar, ">", 8.0 * np1);
    c.add_log("Q^4 tau q^{-nu^2/2} > Q^4 tau e^{8(n+1)}", 4 * lq + std::log(tau) + l_qpow, ">",
              4 * lq + std::log(tau) + 8.0 * np1);
    c.add_log("Q^4 tau e^{8(n+1)} >= e^{-4(pi^2/6)n} tau e^{8(n+1)}", 4 * lq + std::log(tau) + 8.0 * np1, ">=",
              4 * lq_lower + std::log(tau) + 8.0 * np1);
    c.add_log("e^{(8 - 2pi^2/3)n + 8} tau > e^{n+8}/(4(n+1)^2)",
              (8.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0) * n + 8.0 + std::log(tau), ">", l_lower);
    c.add_log("e^{n+8}/(4(n+1)^2) >= e^{10}/36", l_lower, ">=", 10.0 - std::log(36.0));
    c.add_log("|Theta*| exceeds the chained lower bound", l_star, ">", l_lower);

    const double g_actual = std::abs(tail_g(QParam::make(h), x).value);
    const double g1 = 1.0 / (std::pow(h, -nu - 0.5) - 1.0);
    const double g2 = 1.0 / (std::pow(h, -4.0 * np1 - 0.5) - 1.0);
    const double g3 = 1.0 / (std::exp(4.0) / std::sqrt(h) - 1.0);
    c.add("|G| <= 1/(q^{-nu-1/2} - 1)", g_actual, "<=", g1);
    c.add("1/(q^{-nu-1/2} - 1) <= 1/(h^{-4(n+1)-1/2} - 1)", g1, "<=", g2);
    c.add("1/(h^{-4(n+1)-1/2} - 1) <= 1/(e^4 h^{-1/2} - 1)", g2, "<=", g3);
    c.add("1/(e^4 h^{-1/2} - 1) <= 1/(e^4 - 1)", g3, "<=", r.g_upper);
    c.add("1/(e^4 - 1) < e^{10}/36", r.g_upper, "<", std::exp(10.0) / 36.0);
    finish(r, c.take());
    return r;
}

} // namespace

std::string to_string(LineSide s) { return s == LineSide::left ? "left" : "right"; }

double line_abscissa(const QParam& q, int nu) {
    if (nu < 1) throw DomainError("line index nu must be >= 1");
    const double l = (nu + 0.5) * -std::log(q.abs());
    if (l > 709.0) throw RangeError("line abscissa overflows binary64");
    return -std::exp(l);
}

LineSpec make_line_spec(const QParam& q, int nu, LineSide side, bool require_first_index) {
    if (side == LineSide::right && q.value() > 0.0)
        throw DomainError("right-hand lines are defined only for q < 0");
    if (require_first_index && q.in_interval_family() && nu < first_line_index(q.regime(), q.n()))
        throw DomainError("nu = " + std::to_string(nu) + " is below l_n = "
                          + std::to_string(first_line_index(q.regime(), q.n())));
    const double a = line_abscissa(q, nu);
    return {q.value(), nu, side, side == LineSide::left ? a : -a};
}

LineCheckReport check_line(const LineSpec& spec, double im_range, int samples) {
    if (samples < 64) throw DomainError("check_line needs at least 64 samples");
    if (!(im_range > 0.0)) throw DomainError("im_range must be positive");
    const QParam q = QParam::make(spec.q);
    const ThetaFunction f(q);
    const auto log_star = [&f](cdouble x) { return f.theta_star_with_log_derivative(x).first.log_abs(); };
    // |Theta*| - g in the log domain, saturating instead of overflowing.
    const auto gap = [](double log_s, double g) {
        if (log_s > 709.0) return std::numeric_limits<double>::max();
        return std::exp(log_s) - g;
    };

    LineCheckReport r;
    r.spec = spec;
    const cdouble axis(spec.abscissa, 0.0);
    double log_axis = log_star(axis);
    r.g_bound_at_axis = g_bound(axis);
    r.theta_star_at_axis = exp_capped(log_axis);
    r.margin = gap(log_axis, r.g_bound_at_axis);
    if (log_axis < 700.0
        && std::abs(r.margin) < 1e3 * std::numeric_limits<double>::epsilon() * r.theta_star_at_axis) {
        r.theta_star_at_axis = std::abs(theta_star(q, axis, Precision::extended).eval.value);
        log_axis = std::log(r.theta_star_at_axis);
        r.margin = r.theta_star_at_axis - r.g_bound_at_axis;
        r.extended_precision_used = true;
    }

    r.sampled_min_gap = r.margin;
    r.axis_is_minimum = true;
    const double im_min = 1e-3;
    for (int i = 1; i < samples; ++i) {
        const double v = im_min * std::pow(im_range / im_min, static_cast<double>(i - 1) / (samples - 2));
        const cdouble x(spec.abscissa, v);
        const double ls = log_star(x);
        r.sampled_min_gap = std::min(r.sampled_min_gap, gap(ls, g_bound(x)));
        if (ls < log_axis - 1e-12) r.axis_is_minimum = false;
    }

    if (q.value() < 0.0) {
        const ThetaFunction fp(QParam::make(q.abs()));
        const double log_pos = fp.theta_star_with_log_derivative(cdouble(-std::abs(spec.abscissa), 0.0)).first.log_abs();
        r.positive_counterpart = exp_capped(log_pos);
        r.cross_sign_ok = log_axis > log_pos;
    }
    r.pass = r.margin > 0.0 && r.sampled_min_gap > 0.0 && r.cross_sign_ok;
    return r;
}

Lemma1Report lemma1_chain(int n) {
    if (n < 1) throw DomainError("lemma chain index n must be >= 1");
    return n == 1 ? lemma1_first_interval() : lemma1_general(n);
}

double gamma_n(int n) {
    if (n < 6) throw DomainError("gamma_n requires n >= 6");
    return std::pow(1.0 - 1.0 / (kAlpha0 * (n - 1)), -n + 0.5);
}

bool gamma_decreasing(int from, int to) {
    for (int n = from; n < to; ++n)
        if (!(gamma_n(n + 1) < gamma_n(n))) return false;
    return true;
}

double b_n(int n) {
    if (n < 2) throw DomainError("b_n requires n >= 2");
    return -std::pow(1.0 - 1.0 / n, -4.0 * (n + 1) - 0.5);
}

bool b_increasing(int from, int to) {
    for (int n = from; n < to; ++n)
        if (!(b_n(n + 1) > b_n(n))) return false;
    return true;
}

FactorComparison factor_comparison(double q_star, int nu, int m, int x_sign, double im) {
    if (!(q_star > 0.0 && q_star < 1.0)) throw DomainError("q* must lie in (0, 1)");
    if (nu < 1 || m < 1) throw DomainError("nu and m must be >= 1");
    if (x_sign != 1 && x_sign != -1) throw DomainError("x_sign must be +1 or -1");

    FactorComparison c;
    c.q_star = q_star;
    c.nu = nu;
    c.m = m;
    c.x_sign = x_sign;
    c.im = im;
    const double d = std::pow(q_star, -nu - 0.5);
    const cdouble xa(-d, im);
    const cdouble xb(x_sign * d, im);
    const double qa_m = std::pow(q_star, m);
    const double qb_m = (m % 2 == 0 ? 1.0 : -1.0) * qa_m;
    const double qa_m1 = std::pow(q_star, m - 1);
    const double qb_m1 = ((m - 1) % 2 == 0 ? 1.0 : -1.0) * qa_m1;
    c.mu_A = 1.0 - qa_m;
    c.mu_B = 1.0 - qb_m;
    c.lambda_A = 1.0 + xa * qa_m;
    c.lambda_B = 1.0 + xb * qb_m;
    c.chi_A = 1.0 + qa_m1 / xa;
    c.chi_B = 1.0 + qb_m1 / xb;

    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max({1.0, std::abs(a), std::abs(b)}); };
    c.mu_equal = close(c.mu_A, c.mu_B);
    c.lambda_equal = close(std::abs(c.lambda_A.real()), std::abs(c.lambda_B.real()));
    c.chi_equal = close(std::abs(c.chi_A.real()), std::abs(c.chi_B.real()));

    const bool expect_mu_equal = m % 2 == 0;
    const bool expect_lambda_equal = x_sign * (m % 2 == 0 ? 1 : -1) == -1;
    const bool expect_chi_equal = x_sign * ((m - 1) % 2 == 0 ? 1 : -1) == -1;
    const auto ge = [](double a, double b) { return a >= b * (1.0 - 1e-13); };
    c.holds = c.mu_equal == expect_mu_equal && c.lambda_equal == expect_lambda_equal
              && c.chi_equal == expect_chi_equal && ge(c.mu_B, c.mu_A)
              && (c.mu_equal || (c.mu_B > 1.0 && c.mu_A < 1.0))
              && ge(std::abs(c.lambda_B.real()), std::abs(c.lambda_A.real()))
              && ge(std::abs(c.chi_B.real()), std::abs(c.chi_A.real()))
              && close(std::abs(c.lambda_A.imag()), std::abs(c.lambda_B.imag()))
              && close(std::abs(c.chi_A.imag()), std::abs(c.chi_B.imag()));
    return c;
}

FactorProductComparison factor_product_comparison(double q_star, int nu, int x_sign, double im, int m_max) {
    if (m_max < 1) throw DomainError("m_max must be >= 1");
    FactorProductComparison p;
    double la = 0.0;
    double lb = 0.0;
    p.all_factors_hold = true;
    for (int m = 1; m <= m_max; ++m) {
        const FactorComparison c = factor_comparison(q_star, nu, m, x_sign, im);
        p.all_factors_hold = p.all_factors_hold && c.holds;
        la += std::log(std::abs(c.mu_A)) + std::log(std::abs(c.lambda_A)) + std::log(std::abs(c.chi_A));
        lb += std::log(std::abs(c.mu_B)) + std::log(std::abs(c.lambda_B)) + std::log(std::abs(c.chi_B));
    }
    p.product_A = exp_capped(la);
    p.product_B = exp_capped(lb);
    const double d = std::pow(q_star, -nu - 0.5);
    p.theta_star_A = exp_capped(log_theta_star_abs(q_star, cdouble(-d, im)));
    p.theta_star_B = exp_capped(log_theta_star_abs(-q_star, cdouble(x_sign * d, im)));
    p.holds = p.all_factors_hold && lb >= la && p.theta_star_B > p.theta_star_A;
    return p;
}

std::vector<ChainLink> sequence_facts() {
    Chain c;
    c.add("gamma_n decreasing for n = 6..30", gamma_decreasing(6, 30) ? 1.0 : 0.0, "==", 1.0);
    c.add("b_n increasing for n = 2..30", b_increasing(2, 30) ? 1.0 : 0.0, "==", 1.0);
    double min_b3 = 0.0;
    double min_b5 = 0.0;
    for (int n = 3; n <= 30; ++n) min_b3 = std::min(min_b3, b_n(n));
    for (int n = 5; n <= 30; ++n) min_b5 = std::min(min_b5, b_n(n));
    c.add("b_n in I = [-1226, 0] for n >= 3", min_b3, ">=", -1226.0);
    c.add("b_n in [-237, 237] for n >= 5", min_b5, ">=", -237.0);
    c.add("gamma_6 <= 1226", gamma_n(6), "<=", 1226.0);
    c.add("gamma_13 < 237", gamma_n(13), "<", 237.0);
    c.add("1 - 1/(5 alpha0) < q~1", 1.0 - 1.0 / (5.0 * kAlpha0), "<", constants::kFirstPositiveSpectral);
    c.add("|q-1| > 1 - 1/(12 alpha0)", -constants::kFirstNegativeSpectral, ">", 1.0 - 1.0 / (12.0 * kAlpha0));
    c.add("1226 * 3/2 < |b_2|", 1226.0 * 1.5, "<", -b_n(2));
    c.add("237/364 < |q-1|", 237.0 / 364.0, "<", -constants::kFirstNegativeSpectral);
    c.add("|b_4| < 364.2", -b_n(4), "<", 364.2);
    return c.take();
}

} // namespace ptheta
