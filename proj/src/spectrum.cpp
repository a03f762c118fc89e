#include "ptheta/spectrum.hpp"

#include "ptheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ptheta {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;

ZeroClassification census(double q, const ZeroFinderOptions& options) {
    const QParam qp = QParam::make(q);
    return classify_zeros(find_zeros_in_disk(qp, default_census_k(qp), options), options.pairing_tol);
}

// Conjugate pair with the smallest imaginary part.
cdouble youngest_pair(const ZeroClassification& c) {
    cdouble best{};
    double best_im = std::numeric_limits<double>::infinity();
    for (const auto& [up, down] : c.ccps) {
        if (up.location.imag() < best_im) {
            best_im = up.location.imag();
            best = up.location;
        }
    }
    return best;
}

// Consecutive real zeros whose midpoint is closest to x.
std::pair<double, double> closest_real_pair(const ZeroClassification& c, double x) {
    std::vector<double> re;
    for (const Zero& z : c.real_zeros) re.push_back(z.location.real());
    std::sort(re.begin(), re.end());
    std::pair<double, double> best{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < re.size(); ++i) {
        const double d = std::abs(0.5 * (re[i] + re[i + 1]) - x);
        if (d < best_d) {
            best_d = d;
            best = {re[i], re[i + 1]};
        }
    }
    return best;
}

} // namespace

int default_census_k(const QParam& q) {
    const double target = q.regime() == Regime::positive ? 6000.0 : 400.0;
    int k = 0;
    while (circle_radius(q, k) <= target) ++k;
    return k;
}

int count_ccps(const QParam& q, int k, const ZeroFinderOptions& options) {
    const int kk = k < 0 ? default_census_k(q) : k;
    return static_cast<int>(classify_zeros(find_zeros_in_disk(q, kk, options), options.pairing_tol).ccps.size());
}

std::pair<double, double> double_zero_interval(Regime r) {
    return r == Regime::positive ? std::pair{-1226.0, 0.0} : std::pair{-237.0, 237.0};
}

SpectralValue find_spectral_value(Regime regime, int j, std::pair<double, double> bracket0,
                                  const SpectrumOptions& options) {
    if (j < 1) throw DomainError("spectral index j must be >= 1");
    auto [lo, hi] = bracket0;
    if (!(lo < hi)) throw DomainError("bracket must satisfy lo < hi");
    const bool positive = regime == Regime::positive;
    if (positive ? !(lo > 0.0) : !(hi < 0.0)) throw DomainError("bracket sign does not match the regime");
    if (!(options.bracket_tol > 0.0)) throw DomainError("bracket tolerance must be positive");

    // `near` is the end closer to q = 0, where the pair is not yet born.
    double near = positive ? lo : hi;
    double far = positive ? hi : lo;
    ZeroFinderOptions finder = options.finder;
    int c_near = count_ccps(QParam::make(near), -1, finder);
    int c_far = count_ccps(QParam::make(far), -1, finder);
    if (c_near >= j || c_far < j)
        throw DomainError("bracket does not straddle spectral value " + std::to_string(j) + " (counts "
                          + std::to_string(c_near) + " and " + std::to_string(c_far) + ")");

    while (std::abs(far - near) > options.bracket_tol) {
        const double mid = 0.5 * (near + far);
        // Near a double zero the residual scales quadratically.
        if (std::abs(far - near) < 1e-4) finder.residual_tol = options.finder.residual_tol * 1e3;
        const int c = count_ccps(QParam::make(mid), -1, finder);
        if (c >= j) {
            far = mid;
            c_far = c;
        } else {
            near = mid;
            c_near = c;
        }
    }
    if (c_far - c_near != 1)
        throw ConvergenceError("CCP count changes by " + std::to_string(c_far - c_near)
                               + " within the final bracket; a spectral value was skipped");

    SpectralValue sv;
    sv.index_j = j;
    sv.regime = regime;
    sv.bracket = {std::min(near, far), std::max(near, far)};
    sv.q_value = 0.5 * (near + far);
    sv.ccps_before = c_near;
    sv.ccps_after = c_far;

    const ZeroClassification after = census(far, finder);
    sv.newborn_zero = youngest_pair(after);
    sv.double_zero_x = sv.newborn_zero.real();
    const ZeroClassification before = census(near, finder);
    sv.coalescing_real_pair = closest_real_pair(before, sv.double_zero_x);

    const auto [a, b] = double_zero_interval(regime);
    sv.in_interval = sv.double_zero_x >= a && sv.double_zero_x <= b;
    return sv;
}

std::pair<double, double> scan_spectral_bracket(Regime regime, int j, double step) {
    if (j < 1) throw DomainError("spectral index j must be >= 1");
    if (!(step > 0.0)) throw DomainError("scan step must be positive");
    const double s = regime == Regime::positive ? 1.0 : -1.0;
    double prev = 0.05;
    if (count_ccps(QParam::make(s * prev)) >= j) throw DomainError("spectral value lies below |q| = 0.05");
    for (double a = 0.05 + step; a <= constants::kMaxAbsQ + 1e-12; a += step) {
        const double cur = std::min(a, constants::kMaxAbsQ);
        if (count_ccps(QParam::make(s * cur)) >= j) {
            return s > 0.0 ? std::pair{prev, cur} : std::pair{-cur, -prev};
        }
        prev = cur;
    }
    throw DomainError("spectral value " + std::to_string(j) + " not found within the supported range");
}

CcpTrajectory track_ccp(const SpectralValue& birth, double q_end, double max_step, const TrackOptions& options) {
    const double dir = birth.regime == Regime::positive ? 1.0 : -1.0;
    if (!((q_end - birth.q_value) * dir > 0.0)) throw DomainError("q_end must lie beyond the birth value");
    if (!(max_step > 0.0)) throw DomainError("max_step must be positive");

    CcpTrajectory traj;
    traj.birth_q = birth.q_value;

    double q = birth.q_value + dir * std::min(options.start_offset, std::abs(q_end - birth.q_value) / 2.0);
    {
        ZeroFinderOptions finder;
        finder.residual_tol *= 1e3;
        const ZeroClassification c = census(q, finder);
        double best = std::numeric_limits<double>::infinity();
        cdouble start{};
        for (const auto& [up, down] : c.ccps) {
            const double d = std::abs(up.location - cdouble(birth.double_zero_x, 0.0));
            if (d < best) {
                best = d;
                start = up.location;
            }
        }
        if (!std::isfinite(best)) throw ConvergenceError("no conjugate pair found just past the birth value");
        const ThetaFunction f(QParam::make(q));
        traj.samples.push_back({q, start, std::abs(f(start).value.to_complex())});
    }

    double h = std::min(options.initial_step, max_step);
    double h_prev = h;
    while ((q_end - q) * dir > 0.0) {
        h = std::min(h, std::abs(q_end - q));
        if (h < options.min_step) throw ConvergenceError("continuation step underflow");
        const double qn = std::abs(q_end - q) <= h ? q_end : q + dir * h;
        const cdouble z = traj.samples.back().z;
        cdouble pred = z;
        if (traj.samples.size() >= 2) pred = z + (z - traj.samples[traj.samples.size() - 2].z) * (h / h_prev);

        const ThetaFunction f(QParam::make(qn));
        cdouble zn = pred;
        int iters = 0;
        bool converged = false;
        for (; iters < 8; ++iters) {
            const ThetaValue v = f(zn);
            if (v.value.is_zero()) {
                converged = true;
                break;
            }
            const cdouble step = v.newton_step();
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            zn -= step;
            if (std::abs(step) <= 8.0 * kUnit * std::abs(zn) + 1e-300) {
                converged = true;
                break;
            }
        }
        if (converged) zn = polish_zero(f, zn, 4);
        const ThetaValue v = f(zn);
        const bool residual_ok = v.value.is_zero()
                                 || v.value.log_abs() <= std::log(options.residual_tol) + log_max_term(f.q(), std::abs(zn));
        const bool accept = converged && iters <= 5 && zn.imag() > 0.0 && std::abs(zn - z) <= 0.5 * z.imag()
                            && residual_ok;
        if (!accept) {
            h /= 2.0;
            continue;
        }
        traj.samples.push_back({qn, zn, std::abs(v.value.to_complex())});
        q = qn;
        h_prev = h;
        if (iters <= 3) h = std::min(2.0 * h, max_step);
    }
    return traj;
}

} // namespace ptheta
