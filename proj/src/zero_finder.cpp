#include "ptheta/zero_finder.hpp"

#include "ptheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ptheta {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr int kMaxRefineDepth = 24;
constexpr int kAberthAttempts = 6;

double wrap_phase(double d) {
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    return d;
}

double refine_phase(const std::function<double(cdouble)>& arg_of, cdouble center, double radius, double t0,
                    double a0, double t1, double a1, int depth) {
    const double d = wrap_phase(a1 - a0);
    if (std::abs(d) < std::numbers::pi / 2.0) return d;
    if (depth >= kMaxRefineDepth)
        throw ConvergenceError("phase jump >= pi/2 at maximum refinement (zero near the contour?)");
    const double tm = 0.5 * (t0 + t1);
    const double am = arg_of(center + std::polar(radius, tm));
    return refine_phase(arg_of, center, radius, t0, a0, tm, am, depth + 1)
           + refine_phase(arg_of, center, radius, tm, am, t1, a1, depth + 1);
}

double theta_arg(const ThetaFunction& f, cdouble x) {
    const ThetaValue v = f(x);
    if (v.value.is_zero()) throw ConvergenceError("theta vanishes on a counting contour");
    return v.value.arg();
}

int circle_samples(int k) { return std::max(256, 32 * (k + 2)); }

int count_on_circle(const ThetaFunction& f, int k) {
    return winding_number([&f](cdouble x) { return theta_arg(f, x); }, cdouble{}, circle_radius(f.q(), k),
                          circle_samples(k));
}

double sign_on_axis(const ThetaFunction& f, double x) {
    const ThetaValue v = f(cdouble(x, 0.0));
    const double re = v.value.mantissa().real();
    return re > 0.0 ? 1.0 : (re < 0.0 ? -1.0 : 0.0);
}

// Safeguarded Newton-bisection for a real root bracketed by [lo, hi].
double bracketed_real_root(const ThetaFunction& f, double lo, double hi, double sign_lo) {
    double x = 0.5 * (lo + hi);
    double last_width = hi - lo;
    for (int iter = 0; iter < 400; ++iter) {
        const ThetaValue v = f(cdouble(x, 0.0));
        const double re = v.value.mantissa().real();
        if (re == 0.0) return x;
        if ((re > 0.0) == (sign_lo > 0.0))
            lo = x;
        else
            hi = x;
        const double width = hi - lo;
        const double step = v.newton_step().real();
        double next = x - step;
        const bool inside = next > lo && next < hi && std::isfinite(next);
        if (!inside || width > 0.5 * last_width) next = 0.5 * (lo + hi);
        last_width = width;
        const double tol = 4.0 * kUnit * std::abs(x);
        if (std::abs(next - x) <= tol || width <= tol) return next;
        x = next;
    }
    throw ConvergenceError("real root iteration did not converge");
}

// Starting points one per annulus near the zeros of Theta*, with small
// asymmetric angular offsets so conjugate pairs can form.
std::vector<cdouble> initial_guesses(const QParam& q, int count, int attempt) {
    std::vector<cdouble> z;
    z.reserve(count);
    const double lq = -std::log(q.abs());
    for (int i = 1; i <= count; ++i) {
        const double base = (q.value() > 0.0 || i % 2 == 0) ? std::numbers::pi : 0.0;
        const double spread = 0.25 + 0.15 * attempt;
        const double offset = (i % 2 == 1 ? spread : -0.8 * spread) + 0.013 * (i % 5) + 0.07 * attempt;
        const double radius = std::exp(lq * (static_cast<double>(i) - 0.1 + 0.05 * attempt));
        z.push_back(std::polar(radius, base + offset));
    }
    return z;
}

struct AberthResult {
    std::vector<cdouble> roots;
    bool converged = false;
};

AberthResult aberth(const ThetaFunction& f, std::vector<cdouble> z, const std::vector<cdouble>& fixed,
                    const ZeroFinderOptions& opt) {
    const std::size_t n = z.size();
    std::vector<bool> done(n, false);
    for (int it = 0; it < opt.max_iterations; ++it) {
        bool all_done = true;
        for (std::size_t i = 0; i < n; ++i) {
            const ThetaValue v = f(z[i]);
            if (v.value.is_zero()) {
                done[i] = true;
                continue;
            }
            cdouble newton = v.derivative.is_zero() ? cdouble(1e-3 * (1.0 + std::abs(z[i])), 0.0) : v.newton_step();
            if (!std::isfinite(newton.real()) || !std::isfinite(newton.imag()))
                newton = cdouble(1e-3 * (1.0 + std::abs(z[i])), 1e-3);
            cdouble s{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            for (const cdouble& w : fixed) s += 1.0 / (z[i] - w);
            const cdouble w = newton / (1.0 - newton * s);
            z[i] -= w;
            const double noise = v.derivative.is_zero()
                                     ? 0.0
                                     : 4.0 * std::exp(v.log_error - v.derivative.log_abs());
            done[i] = std::abs(w) <= opt.eps * std::abs(z[i]) || std::abs(w) <= noise;
            all_done = all_done && done[i];
        }
        if (all_done) return {std::move(z), true};
    }
    return {std::move(z), false};
}

double residual_of(const ThetaFunction& f, cdouble z) { return std::abs(f(z).value.to_complex()); }

bool residual_ok(const ThetaFunction& f, cdouble z, double tol) {
    const ThetaValue v = f(z);
    if (v.value.is_zero()) return true;
    return v.value.log_abs() <= std::log(tol) + log_max_term(f.q(), std::abs(z));
}

struct Cluster {
    cdouble center;
    int size;
    double spread;
};

std::vector<Cluster> cluster_roots(std::vector<cdouble> roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](cdouble a, cdouble b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<bool> used(roots.size(), false);
    std::vector<Cluster> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        cdouble sum = roots[i];
        int size = 1;
        double spread = 0.0;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - roots[i]);
            if (d <= tol * (1.0 + std::abs(roots[i]))) {
                used[j] = true;
                sum += roots[j];
                ++size;
                spread = std::max(spread, d);
            }
        }
        out.push_back({sum / static_cast<double>(size), size, spread});
    }
    return out;
}

// Attempt the inner-disk solve; returns false on any verification failure.
bool solve_inner(const ThetaFunction& f, int count, double inner_radius, const std::vector<cdouble>& fixed,
                 const ZeroFinderOptions& opt, int attempt, std::vector<Zero>& zeros) {
    zeros.clear();
    if (count == 0) return true;
    const AberthResult ar = aberth(f, initial_guesses(f.q(), count, attempt), fixed, opt);
    if (!ar.converged) return false;
    for (const cdouble& z : ar.roots)
        if (!(std::abs(z) < inner_radius)) return false;

    for (const Cluster& c : cluster_roots(ar.roots, opt.cluster_tol)) {
        if (c.size > 2) return false;
        Zero zero;
        zero.multiplicity = c.size;
        if (c.size == 1) {
            zero.location = polish_zero(f, c.center, 3);
        } else {
            // A genuine double zero has winding number 2 on a small circle.
            const double r = std::max(10.0 * c.spread, 1e-5 * (1.0 + std::abs(c.center)));
            const int w = winding_number([&f](cdouble x) { return theta_arg(f, x); }, c.center, r, 64);
            if (w != 2) return false;
            zero.location = c.center;
        }
        const double tol = c.size == 1 ? opt.residual_tol : opt.residual_tol * 1e3;
        if (!residual_ok(f, zero.location, tol)) return false;
        zero.residual = residual_of(f, zero.location);
        zero.annulus_k = annulus_index(f.q(), zero.location);
        zeros.push_back(zero);
    }
    return true;
}

void sort_zeros(std::vector<Zero>& zeros) {
    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
        const double ma = std::abs(a.location);
        const double mb = std::abs(b.location);
        if (ma != mb) return ma < mb;
        return a.location.imag() < b.location.imag();
    });
}

// Make conjugate partners exact mirror images of each other.
void symmetrize_pairs(std::vector<Zero>& zeros, double pairing_tol) {
    std::vector<bool> used(zeros.size(), false);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (used[i] || zeros[i].location.imag() <= 0.0) continue;
        const cdouble zi = zeros[i].location;
        if (zi.imag() <= pairing_tol * (1.0 + std::abs(zi))) continue;
        std::size_t best = zeros.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < zeros.size(); ++j) {
            if (j == i || used[j] || zeros[j].location.imag() >= 0.0) continue;
            const double d = std::abs(zeros[j].location - std::conj(zi));
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best == zeros.size() || best_d > pairing_tol * (1.0 + std::abs(zi))) continue;
        const cdouble avg = 0.5 * (zi + std::conj(zeros[best].location));
        zeros[i].location = avg;
        zeros[best].location = std::conj(avg);
        used[i] = used[best] = true;
    }
}

} // namespace

int ZeroSet::multiplicity_sum() const {
    int s = 0;
    for (const Zero& z : zeros) s += z.multiplicity;
    return s;
}

std::vector<LogCoefficient> taylor_coefficients(const QParam& q, int n) {
    if (n < 1) throw DomainError("taylor_coefficients requires N >= 1");
    const double a = std::log(q.abs());
    std::vector<LogCoefficient> c;
    c.reserve(n + 1);
    for (long long j = 0; j <= n; ++j)
        c.push_back({static_cast<double>(j * (j + 1) / 2) * a, coefficient_sign(q, j)});
    c[0].log_magnitude = 0.0;
    return c;
}

double circle_radius(const QParam& q, int k) {
    if (k < 0) throw DomainError("circle index k must be >= 0");
    return std::exp((k + 0.5) * -std::log(q.abs()));
}

int annulus_index(const QParam& q, cdouble z) {
    const double m = std::abs(z);
    if (m == 0.0) return 0;
    const double k = std::floor(std::log(m) / -std::log(q.abs()) + 0.5);
    return k < 0.0 ? 0 : static_cast<int>(k);
}

int annulus_law_start(const QParam& q) {
    const double alpha0 = std::sqrt(3.0) / (2.0 * std::numbers::pi);
    const double need = 1.0 / (alpha0 * (1.0 - q.abs()));
    return std::max(5, static_cast<int>(std::ceil(need - 1e-12)));
}

int winding_number(const std::function<double(cdouble)>& arg_of, cdouble center, double radius,
                   int initial_samples) {
    const int m = std::max(initial_samples, 8);
    std::vector<double> args(m + 1);
    for (int i = 0; i < m; ++i)
        args[i] = arg_of(center + std::polar(radius, 2.0 * std::numbers::pi * i / m));
    args[m] = args[0];
    double total = 0.0;
    for (int i = 0; i < m; ++i)
        total += refine_phase(arg_of, center, radius, 2.0 * std::numbers::pi * i / m, args[i],
                              2.0 * std::numbers::pi * (i + 1) / m, args[i + 1], 0);
    const double turns = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-6) throw ConvergenceError("winding number is not an integer");
    return static_cast<int>(rounded);
}

int count_zeros_in_circle(const QParam& q, int k) {
    q.require_supported();
    return count_on_circle(ThetaFunction(q), k);
}

bool solve_annulus_on_real_axis(const ThetaFunction& f, int k, cdouble& root) {
    const double r_in = circle_radius(f.q(), k - 1);
    const double r_out = circle_radius(f.q(), k);
    int found = 0;
    for (double side : {-1.0, 1.0}) {
        const double a = side * r_in;
        const double b = side * r_out;
        const double sa = sign_on_axis(f, a);
        const double sb = sign_on_axis(f, b);
        if (sa == 0.0 || sb == 0.0 || sa == sb) continue;
        ++found;
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        root = cdouble(bracketed_real_root(f, lo, hi, lo == a ? sa : sb), 0.0);
    }
    return found == 1;
}

cdouble polish_zero(const ThetaFunction& f, cdouble z, int max_iterations) {
    double last = std::numeric_limits<double>::infinity();
    for (int i = 0; i < max_iterations; ++i) {
        const ThetaValue v = f(z);
        if (v.value.is_zero() || v.derivative.is_zero()) return z;
        const cdouble step = v.newton_step();
        const double s = std::abs(step);
        if (!std::isfinite(s) || s >= last) return z;
        z -= step;
        if (s <= 2.0 * kUnit * std::abs(z)) return z;
        last = s;
    }
    return z;
}

ZeroSet find_zeros_in_disk(const QParam& q, int k, const ZeroFinderOptions& options) {
    q.require_supported();
    if (k < 0) throw DomainError("disk index k must be >= 0");
    const ThetaFunction f(q);
    ZeroSet out;
    out.q = q.value();
    out.disk_k = k;
    out.disk_radius = circle_radius(q, k);

    // Outer annuli: one real zero each. A failure moves the annulus inside.
    int n0 = annulus_law_start(q);
    const int k_last = std::max(k, n0 - 1) + 2;
    std::vector<std::pair<int, cdouble>> outer;
    for (int kk = n0; kk <= k_last; ++kk) {
        cdouble root;
        if (solve_annulus_on_real_axis(f, kk, root)) {
            outer.emplace_back(kk, root);
        } else if (kk <= k) {
            n0 = kk + 1;
            outer.clear();
        }
    }

    const int inner_k = n0 - 1;
    const double inner_radius = circle_radius(q, inner_k);
    const int inner_count = count_on_circle(f, inner_k);
    std::vector<cdouble> fixed;
    for (const auto& [kk, z] : outer) fixed.push_back(z);

    std::vector<Zero> inner;
    bool ok = false;
    for (int attempt = 0; attempt < kAberthAttempts && !ok; ++attempt)
        ok = solve_inner(f, inner_count, inner_radius, fixed, options, attempt, inner);
    if (!ok)
        throw ConvergenceError("simultaneous iteration failed for q = " + std::to_string(q.value()) + " ("
                               + std::to_string(inner_count) + " zeros in the inner disk)");

    for (const Zero& z : inner)
        if (std::abs(z.location) < out.disk_radius) out.zeros.push_back(z);
    for (const auto& [kk, z] : outer) {
        if (!(std::abs(z) < out.disk_radius)) continue;
        Zero zero;
        zero.location = z;
        zero.residual = residual_of(f, z);
        zero.annulus_k = annulus_index(q, z);
        if (!residual_ok(f, z, options.residual_tol))
            throw ConvergenceError("real zero in annulus " + std::to_string(kk) + " fails the residual check");
        out.zeros.push_back(zero);
    }
    symmetrize_pairs(out.zeros, options.pairing_tol);
    sort_zeros(out.zeros);

    out.argument_count = k == inner_k ? inner_count : count_on_circle(f, k);
    if (out.multiplicity_sum() != out.argument_count)
        throw CountMismatch("q = " + std::to_string(q.value()) + ": " + std::to_string(out.multiplicity_sum())
                            + " zeros found but the argument principle counts "
                            + std::to_string(out.argument_count));
    return out;
}

ZeroClassification classify_zeros(const ZeroSet& zs, double pairing_tol) {
    ZeroClassification out;
    std::vector<Zero> upper;
    std::vector<Zero> lower;
    for (Zero z : zs.zeros) {
        const double im = z.location.imag();
        if (std::abs(im) <= pairing_tol * (1.0 + std::abs(z.location))) {
            z.location = cdouble(z.location.real(), 0.0);
            out.real_zeros.push_back(z);
        } else if (im > 0.0) {
            upper.push_back(z);
        } else {
            lower.push_back(z);
        }
    }
    std::vector<bool> used(lower.size(), false);
    for (const Zero& u : upper) {
        std::size_t best = lower.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(lower[j].location - std::conj(u.location));
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best == lower.size() || best_d > pairing_tol * (1.0 + std::abs(u.location)))
            throw ConvergenceError("non-real zero without a conjugate partner");
        used[best] = true;
        out.ccps.emplace_back(u, lower[best]);
    }
    for (bool b : used)
        if (!b) throw ConvergenceError("non-real zero without a conjugate partner");
    return out;
}

} // namespace ptheta
