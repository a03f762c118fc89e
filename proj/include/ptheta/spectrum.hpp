#pragma once

#include "ptheta/qparam.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zero_finder.hpp"

#include <utility>
#include <vector>

namespace ptheta {

/// A parameter value where theta(q, .) has a double zero and a new complex
/// conjugate pair is born.
struct SpectralValue {
    int index_j = 0;
    double q_value = 0.0;
    std::pair<double, double> bracket{}; // (lo, hi), lo < hi
    double double_zero_x = 0.0;
    Regime regime = Regime::positive;

    int ccps_before = 0; // count on the side where the pair does not exist yet
    int ccps_after = 0;
    std::pair<double, double> coalescing_real_pair{}; // closest real zeros before the birth
    cdouble newborn_zero{};                           // upper member of the new pair after the birth
    bool in_interval = false;                         // double zero within [-1226, 0] or [-237, 237]
};

struct CcpSample {
    double q = 0.0;
    cdouble z{}; // Im z > 0
    double residual = 0.0;
};

struct CcpTrajectory {
    std::vector<CcpSample> samples;
    double birth_q = 0.0;
};

struct SpectrumOptions {
    double bracket_tol = 1e-6;
    ZeroFinderOptions finder{};
};

/// Smallest circle index whose radius exceeds 6000 (q > 0) or 400 (q < 0).
[[nodiscard]] int default_census_k(const QParam& q);

/// Number of conjugate pairs inside |x| < |q|^{-k-1/2}; k < 0 selects the
/// default census disk.
[[nodiscard]] int count_ccps(const QParam& q, int k = -1, const ZeroFinderOptions& options = {});

/// Interval containing the double zero of every spectral value: I = [-1226, 0]
/// for q > 0 and [-237, 237] for q < 0.
[[nodiscard]] std::pair<double, double> double_zero_interval(Regime r);

/// Bisection on the CCP count. The bracket must have fewer than j pairs on the
/// side nearer q = 0 and at least j on the other; the final bracket must see
/// exactly one pair born. Throws DomainError / ConvergenceError otherwise.
[[nodiscard]] SpectralValue find_spectral_value(Regime regime, int j, std::pair<double, double> bracket0,
                                                const SpectrumOptions& options = {});

/// Coarse scan from |q| = 0.05 outward in steps of `step` for a bracket of the
/// j-th spectral value.
[[nodiscard]] std::pair<double, double> scan_spectral_bracket(Regime regime, int j, double step = 0.01);

struct TrackOptions {
    double start_offset = 1e-4;     // distance past the birth where tracking starts
    double residual_tol = 1e-10;    // relative to the largest series term
    double min_step = 1e-12;
    double initial_step = 1e-4;
};

/// Predictor-corrector continuation in q of the upper zero of the pair born
/// at `birth`, up to q_end. `max_step` caps the q-step.
[[nodiscard]] CcpTrajectory track_ccp(const SpectralValue& birth, double q_end, double max_step,
                                      const TrackOptions& options = {});

} // namespace ptheta
