#pragma once

// Evaluation of the partial theta function
//
//     theta(q, x) = sum_{j>=0} q^{j(j+1)/2} x^j,
//
// of the bilateral sum Theta*(q, x) = sum_{j in Z} q^{j(j+1)/2} x^j through the
// Jacobi triple product Theta* = Q P R with
//
//     Q = prod_{m>=1} (1 - q^m),  P = prod_{m>=1} (1 + x q^m),  R = prod_{m>=1} (1 + q^{m-1}/x),
//
// and of the negative-index tail G = Theta* - theta.
//
// Every evaluator reports the bound on the truncation error it committed
// (tail_bound) separately from an a-priori bound on accumulated rounding
// (rounding_bound).

#include "ptheta/double_double.hpp"
#include "ptheta/qparam.hpp"
#include "ptheta/scaled.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace ptheta {

using cdouble = std::complex<double>;

enum class Precision { binary64, extended };

struct EvalOutput {
    cdouble value{};
    double tail_bound = 0.0;
    int terms_used = 0;
    double rounding_bound = 0.0;
};

struct TripleProductFactors {
    double Q_val = 0.0;
    cdouble P_val{};
    cdouble R_val{};
    int truncation_m = 0;       // factors m = 1..truncation_m were multiplied
    double factor_tail_bound = 0.0; // relative bound on the dropped factors
};

struct ThetaStarOutput {
    EvalOutput eval;
    TripleProductFactors factors;
};

/// Hard cap on series degree and product length.
inline constexpr int kMaxTerms = 20000;

/// Smallest N with sum_{j>N} |q|^{j(j+1)/2} R^j <= eps. Throws DomainError for
/// R <= 1 or eps outside (0, 1), PrecisionBudgetExceeded above kMaxTerms.
[[nodiscard]] int truncation_degree(const QParam& q, double radius, double eps);

/// Truncated series in log-magnitude form with compensated summation.
/// Throws RangeError if the value does not fit binary64 (see theta_scaled).
[[nodiscard]] EvalOutput theta(const QParam& q, cdouble x, double eps = 1e-15,
                               Precision precision = Precision::binary64);

/// Same series, returned in scaled form so arbitrarily large |x| is usable.
struct ScaledEvalOutput {
    ScaledComplex value;
    double tail_bound = 0.0;     // absolute, may be +inf if not representable
    int terms_used = 0;
    double log_rounding_bound = 0.0; // natural log of the rounding bound
};
[[nodiscard]] ScaledEvalOutput theta_scaled(const QParam& q, cdouble x, double eps = 1e-15);

/// Theta* via the triple product. Throws DomainError for x = 0,
/// PrecisionBudgetExceeded when the product cap is hit, RangeError on overflow.
[[nodiscard]] ThetaStarOutput theta_star(const QParam& q, cdouble x, Precision precision = Precision::binary64);

/// Tail G(q, x) = sum_{j>=1} q^{j(j-1)/2} x^{-j}. Throws DomainError for |x| <= 1.
[[nodiscard]] EvalOutput tail_g(const QParam& q, cdouble x, Precision precision = Precision::binary64);

/// Majorant 1/(|x| - 1) of |G|. Throws DomainError for |x| <= 1.
[[nodiscard]] double g_bound(cdouble x);

/// Natural log of the largest series term max_j |q|^{j(j+1)/2} |x|^j.
[[nodiscard]] double log_max_term(const QParam& q, double abs_x);

/// The sign of q^{j(j+1)/2} (exponent taken exactly in integers).
[[nodiscard]] int coefficient_sign(const QParam& q, long long j);

/// Value and derivative of theta in scaled form.
struct ThetaValue {
    ScaledComplex value;
    ScaledComplex derivative;
    /// Natural log of an estimate of the absolute rounding error in value.
    double log_error = 0.0;

    /// Newton correction value / derivative.
    [[nodiscard]] cdouble newton_step() const { return ratio(value, derivative); }
};

/// Well-conditioned evaluator used by zero finding and continuation.
///
/// For |x| <= 1 it sums the series directly. For |x| > 1 it uses
/// theta = Theta* - G with Theta* from the triple product: near zeros of theta
/// both Theta* and G are O(1/|x|), so no cancellation of the huge individual
/// series terms takes place. Immutable after construction.
class ThetaFunction {
public:
    explicit ThetaFunction(const QParam& q);

    [[nodiscard]] const QParam& q() const { return q_; }
    [[nodiscard]] ThetaValue operator()(cdouble x) const;

    /// Theta* in scaled form (x != 0), with its logarithmic derivative.
    [[nodiscard]] std::pair<ScaledComplex, cdouble> theta_star_with_log_derivative(cdouble x) const;

    /// Q = prod (1 - q^m).
    [[nodiscard]] double q_product() const { return q_product_; }

private:
    [[nodiscard]] ThetaValue series(cdouble x) const;
    [[nodiscard]] ThetaValue split(cdouble x) const;

    QParam q_;
    std::vector<double> powers_; // powers_[m] = q^m until |q|^m underflows below 1e-300
    double q_product_ = 0.0;
};

} // namespace ptheta
