#pragma once

#include "ptheta/qparam.hpp"
#include "ptheta/theta_eval.hpp"

#include <string>
#include <vector>

namespace ptheta {

enum class LineSide { left, right };

[[nodiscard]] std::string to_string(LineSide s);

/// Vertical line Re x = -|q|^{-nu-1/2} (left) or +|q|^{-nu-1/2} (right, q < 0 only).
struct LineSpec {
    double q = 0.0;
    int nu = 0;
    LineSide side = LineSide::left;
    double abscissa = 0.0;
};

/// Builds and validates a line. With `require_first_index`, nu must be at
/// least l_n for the interval K_n / J_n containing q.
[[nodiscard]] LineSpec make_line_spec(const QParam& q, int nu, LineSide side, bool require_first_index = true);

/// -|q|^{-nu-1/2}. Throws DomainError for nu < 1, RangeError on overflow.
[[nodiscard]] double line_abscissa(const QParam& q, int nu);

struct LineCheckReport {
    LineSpec spec;
    // Values too large for binary64 are reported as +inf (|Theta*|) or as the
    // largest finite double (margins).
    double theta_star_at_axis = 0.0; // |Theta*| at the real point of the line
    double g_bound_at_axis = 0.0;
    double margin = 0.0;
    double sampled_min_gap = 0.0;   // min over samples of |Theta*| - 1/(|x| - 1)
    bool axis_is_minimum = false;   // no sample below the axis value (relative 1e-12)
    bool extended_precision_used = false;
    // For q < 0: |Theta*(|q|, -|q|^{-nu-1/2})| of the matched positive-q line.
    double positive_counterpart = 0.0;
    bool cross_sign_ok = true;
    bool pass = false;
};

/// Compares |Theta*| with the G majorant along the line: at the axis point and
/// at `samples` points with 0 <= Im x <= im_range, geometrically spaced near
/// the axis. Throws DomainError for samples < 64.
[[nodiscard]] LineCheckReport check_line(const LineSpec& spec, double im_range = 200.0, int samples = 256);

/// One inequality of a chain, lhs `relation` rhs.
struct ChainLink {
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string relation; // ">", ">=", "<", "<=", "=="
    bool holds = false;
};

struct Lemma1Report {
    int n = 0;
    double q_corner = 0.0;
    int nu = 0;
    double Q_lower = 0.0;
    double P_dagger = 0.0;
    double P_flat_or_sharp = 0.0;
    double product_lower = 0.0; // n = 1: chained lower bound for P_flat * P_dagger
    double theta_star_lower = 0.0;
    double g_upper = 0.0;
    double theta_star_actual = 0.0;
    std::vector<ChainLink> chain_values;
    std::string failing_link; // empty when pass
    bool pass = false;
};

/// Replays the inequality chain showing |Theta*| > |G| on the lines L_nu,
/// nu >= l_n, for q in K_n, at the worst-case corner q = 1 - 1/(n+1).
[[nodiscard]] Lemma1Report lemma1_chain(int n);

/// gamma_n = (1 - 1/(alpha0 (n-1)))^{-n+1/2}, alpha0 = sqrt(3)/(2 pi). Requires n >= 6.
[[nodiscard]] double gamma_n(int n);
[[nodiscard]] bool gamma_decreasing(int from, int to);

/// b_n = -(1 - 1/n)^{-4(n+1)-1/2}. Requires n >= 2.
[[nodiscard]] double b_n(int n);
[[nodiscard]] bool b_increasing(int from, int to);

/// Factors mu = 1 - q^m, lambda = 1 + x q^m, chi = 1 + q^{m-1}/x in case A
/// (q = q*, Re x = -q*^{-nu-1/2}) and case B (q = -q*, Re x = sign q*^{-nu-1/2}),
/// with the same Im x in both cases.
struct FactorComparison {
    double q_star = 0.0;
    int nu = 0;
    int m = 0;
    int x_sign = -1;
    double im = 0.0;
    double mu_A = 0.0, mu_B = 0.0;
    cdouble lambda_A{}, lambda_B{};
    cdouble chi_A{}, chi_B{};
    bool mu_equal = false, lambda_equal = false, chi_equal = false;
    bool holds = false;
};

[[nodiscard]] FactorComparison factor_comparison(double q_star, int nu, int m, int x_sign, double im = 0.0);

struct FactorProductComparison {
    double product_A = 0.0; // prod_{m<=m_max} |mu lambda chi| in case A
    double product_B = 0.0;
    double theta_star_A = 0.0; // |Theta*| evaluated directly
    double theta_star_B = 0.0;
    bool all_factors_hold = false;
    bool holds = false;
};

[[nodiscard]] FactorProductComparison factor_product_comparison(double q_star, int nu, int x_sign, double im = 0.0,
                                                                int m_max = 50);

/// Numeric facts used by the line-marching argument (sequence monotonicity,
/// interval memberships, gap coverage).
[[nodiscard]] std::vector<ChainLink> sequence_facts();

} // namespace ptheta
