#pragma once

#include "ptheta/qparam.hpp"
#include "ptheta/theta_eval.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace ptheta {

/// A zero of theta(q, .) with its residual |theta(q, location)|, estimated
/// multiplicity and annulus index k (|q|^{-k+1/2} < |location| < |q|^{-k-1/2},
/// k = 0 for the inner disk |x| < |q|^{-1/2}).
struct Zero {
    cdouble location{};
    double residual = 0.0;
    int multiplicity = 1;
    int annulus_k = 0;
};

struct ZeroSet {
    double q = 0.0;
    int disk_k = 0;
    double disk_radius = 0.0;
    std::vector<Zero> zeros; // sorted by modulus, then by imaginary part
    int argument_count = 0;

    [[nodiscard]] int multiplicity_sum() const;
};

struct ZeroFinderOptions {
    double eps = 1e-14;          // relative convergence of the root iteration
    double pairing_tol = 1e-8;
    double cluster_tol = 1e-6;
    double residual_tol = 1e-10; // relative to the largest series term at the zero
    int max_iterations = 800;
};

/// Taylor coefficient q^{j(j+1)/2} as natural-log magnitude and sign.
struct LogCoefficient {
    double log_magnitude = 0.0;
    int sign = 1;
};

/// c_j = q^{j(j+1)/2}, j = 0..N. Throws DomainError for N < 1.
[[nodiscard]] std::vector<LogCoefficient> taylor_coefficients(const QParam& q, int n);

/// Radius |q|^{-k-1/2} of the zero-free circle number k (k >= 0).
[[nodiscard]] double circle_radius(const QParam& q, int k);

/// Annulus index of a point, see Zero::annulus_k.
[[nodiscard]] int annulus_index(const QParam& q, cdouble z);

/// Winding number of f around 0 along |x - center| = radius, by phase
/// continuation refined until consecutive phase jumps are below pi/2.
/// `arg_of` returns the argument of f at a point. Throws ConvergenceError if
/// the refinement limit is reached.
[[nodiscard]] int winding_number(const std::function<double(cdouble)>& arg_of, cdouble center, double radius,
                                 int initial_samples);

/// Zeros of theta(q, .) inside |x| < |q|^{-k-1/2}, counted with multiplicity
/// by the argument principle.
[[nodiscard]] int count_zeros_in_circle(const QParam& q, int k);

/// All zeros of theta(q, .) in the disk |x| < |q|^{-k-1/2}.
///
/// Outer annuli covered by the one-zero-per-annulus law are solved on the real
/// axis; the inner disk is solved by simultaneous (Aberth) iteration on the
/// well-conditioned Theta* - G evaluator with the outer zeros deflated.
/// Throws CountMismatch if the roots disagree with the argument principle and
/// ConvergenceError if the iteration fails.
[[nodiscard]] ZeroSet find_zeros_in_disk(const QParam& q, int k, const ZeroFinderOptions& options = {});

struct ZeroClassification {
    std::vector<Zero> real_zeros; // imaginary part snapped to 0
    std::vector<std::pair<Zero, Zero>> ccps; // first member has Im > 0
};

/// Split a zero set into real zeros and conjugate pairs. Throws
/// ConvergenceError for a non-real zero without a conjugate partner.
[[nodiscard]] ZeroClassification classify_zeros(const ZeroSet& zs, double pairing_tol = 1e-8);

/// Index n0 >= 5 from which every annulus holds exactly one simple zero:
/// smallest n >= 5 with |q| <= 1 - 1/(alpha0 n), alpha0 = sqrt(3)/(2 pi).
[[nodiscard]] int annulus_law_start(const QParam& q);

/// Real zero of theta in the annulus k >= annulus_law_start(q), located by a
/// sign change on one of the two real segments. Returns false when neither
/// or both segments change sign.
[[nodiscard]] bool solve_annulus_on_real_axis(const ThetaFunction& f, int k, cdouble& root);

/// Newton refinement of a simple zero from a nearby start.
[[nodiscard]] cdouble polish_zero(const ThetaFunction& f, cdouble z, int max_iterations = 50);

} // namespace ptheta
