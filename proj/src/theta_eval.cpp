#include "ptheta/theta_eval.hpp"

#include "ptheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptheta {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kUnitExtended = 0x1p-104;
constexpr double kProductCut = 1e-17;
constexpr double kLogTiny = -745.0;

// Neumaier-compensated accumulation of a complex sum.
class CompensatedSum {
public:
    void add(cdouble v) {
        add_part(re_, re_c_, v.real());
        add_part(im_, im_c_, v.imag());
    }
    [[nodiscard]] cdouble value() const { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_part(double& s, double& c, double v) {
        const double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

ScaledComplex scaled_exp(double log_mag) {
    const double e2 = std::floor(log_mag / std::numbers::ln2);
    return {cdouble(std::exp(log_mag - e2 * std::numbers::ln2), 0.0), static_cast<std::int64_t>(e2)};
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double exp_or_inf(double log_mag) {
    return log_mag > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_mag);
}

// Phase of x^j; exact +-1 on the real axis so real inputs give real outputs.
cdouble unit_power(cdouble x, long long j) {
    if (x.imag() == 0.0) return (x.real() < 0.0 && (j & 1)) ? cdouble(-1.0, 0.0) : cdouble(1.0, 0.0);
    return std::polar(1.0, static_cast<double>(j) * std::arg(x));
}

struct Truncation {
    int degree;
    double bound;
};

// Smallest N such that the geometric majorant of the dropped tail is <= eps.
Truncation truncate_series(const QParam& q, double radius, double eps) {
    const double a = std::log(q.abs());
    const double lr = std::log(radius);
    const double log_eps = std::log(eps);
    for (long long n = 0; n <= kMaxTerms; ++n) {
        const double log_ratio = static_cast<double>(n + 2) * a + lr;
        if (log_ratio >= 0.0) continue;
        const double jn = static_cast<double>(n + 1);
        const double log_next = jn * (jn + 1.0) / 2.0 * a + jn * lr;
        const double log_bound = log_next - std::log1p(-std::exp(log_ratio));
        if (log_bound <= log_eps)
            return {static_cast<int>(n), std::exp(std::max(log_bound, kLogTiny))};
    }
    throw PrecisionBudgetExceeded("series truncation degree exceeds the hard cap");
}

// Complex double-double carried with a separate binary exponent.
struct ScaledDD {
    ComplexDD m;
    std::int64_t e = 0;

    void normalize() {
        const double mx = std::max(std::abs(m.re.hi), std::abs(m.im.hi));
        if (mx == 0.0) {
            e = 0;
            return;
        }
        int k = 0;
        std::frexp(mx, &k);
        m = ldexp(m, -k);
        e += k;
    }
    [[nodiscard]] double log_abs() const {
        const double a = std::abs(m.to_complex());
        return a == 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::log(a) + static_cast<double>(e) * std::numbers::ln2;
    }
};

ScaledDD mul(const ScaledDD& a, const ScaledDD& b) {
    ScaledDD r{a.m * b.m, a.e + b.e};
    r.normalize();
    return r;
}

ScaledDD make_scaled_dd(const ComplexDD& z) {
    ScaledDD r{z, 0};
    r.normalize();
    return r;
}

// The mantissa of s re-expressed relative to 2^ref_exp.
ComplexDD align(const ScaledDD& s, std::int64_t ref_exp) {
    const std::int64_t shift = s.e - ref_exp;
    if (shift < -1100) return {};
    return ldexp(s.m, static_cast<int>(shift));
}

ScaledComplex to_scaled(const ScaledDD& s) { return {s.m.to_complex(), s.e}; }

std::int64_t exponent_for_log(double log_mag) {
    return static_cast<std::int64_t>(std::floor(log_mag / std::numbers::ln2));
}

struct ProductResult {
    ScaledComplex value;
    double q_val = 1.0;
    ScaledComplex p_val{cdouble(1.0, 0.0)};
    ScaledComplex r_val{cdouble(1.0, 0.0)};
    int m_cut = 0;
    double rel_tail = 0.0;
    double rel_rounding = 0.0;
};

// Index after which the dropped factors of Q, P and R are all below the cut,
// together with the relative bound on the dropped part.
std::pair<int, double> product_cut(double aq, double ax) {
    double pw = aq; // |q|^m
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double s = (pw * aq * (1.0 + ax) + pw / ax) / (1.0 - aq);
        if (pw < kProductCut && ax * pw < kProductCut && pw / aq / ax < kProductCut && s < 1e-16)
            return {m, std::expm1(1.01 * s)};
        pw *= aq;
    }
    throw PrecisionBudgetExceeded("triple product length exceeds the hard cap");
}

ProductResult triple_product(const QParam& q, cdouble x) {
    const double qv = q.value();
    const double ax = std::abs(x);
    const auto [m_cut, rel_tail] = product_cut(q.abs(), ax);
    ProductResult out;
    out.m_cut = m_cut;
    out.rel_tail = rel_tail;

    ScaledComplex p(cdouble(1.0, 0.0));
    ScaledComplex r(cdouble(1.0, 0.0));
    double qprod = 1.0;
    double cond = 0.0;
    double pw_prev = 1.0; // q^{m-1}
    for (int m = 1; m <= m_cut; ++m) {
        const double pw = pw_prev * qv;
        const double mu = 1.0 - pw;
        const cdouble a = x * pw;
        const cdouble b = pw_prev / x;
        const cdouble lam = 1.0 + a;
        const cdouble chi = 1.0 + b;
        qprod *= mu;
        p *= ScaledComplex(lam);
        r *= ScaledComplex(chi);
        cond += (1.0 + std::abs(pw)) / std::abs(mu) + (1.0 + std::abs(a)) / std::abs(lam)
                + (1.0 + std::abs(b)) / std::abs(chi);
        pw_prev = pw;
    }
    out.q_val = qprod;
    out.p_val = p;
    out.r_val = r;
    out.value = ScaledComplex(cdouble(qprod, 0.0)) * p * r;
    out.rel_rounding = kUnit * (4.0 * cond + 8.0 * m_cut);
    return out;
}

struct ProductResultDD {
    ScaledDD value;
    ScaledDD q_val, p_val, r_val;
    int m_cut = 0;
    double rel_tail = 0.0;
    double rel_rounding = 0.0;
};

ProductResultDD triple_product_dd(const QParam& q, cdouble x) {
    const double ax = std::abs(x);
    const auto [m_cut, rel_tail] = product_cut(q.abs(), ax);
    const DoubleDouble qd(q.value());
    const ComplexDD xd(x);
    const DoubleDouble one(1.0);
    ProductResultDD out;
    out.m_cut = m_cut;
    out.rel_tail = rel_tail;
    out.q_val = make_scaled_dd(ComplexDD(one, {}));
    out.p_val = out.q_val;
    out.r_val = out.q_val;

    // q^m in double-double with its own exponent so tiny powers do not underflow.
    ScaledDD pw_prev = out.q_val;
    const ScaledDD qs = make_scaled_dd(ComplexDD(qd, {}));
    double cond = 0.0;
    for (int m = 1; m <= m_cut; ++m) {
        const ScaledDD pw = mul(pw_prev, qs);
        const ComplexDD pw_plain = align(pw, 0);
        const ComplexDD pw_prev_plain = align(pw_prev, 0);
        const ComplexDD mu = ComplexDD(one, {}) - pw_plain;
        const ComplexDD a = xd * pw_plain;
        const ComplexDD b = pw_prev_plain / xd;
        const ComplexDD lam = ComplexDD(one, {}) + a;
        const ComplexDD chi = ComplexDD(one, {}) + b;
        out.q_val = mul(out.q_val, make_scaled_dd(mu));
        out.p_val = mul(out.p_val, make_scaled_dd(lam));
        out.r_val = mul(out.r_val, make_scaled_dd(chi));
        cond += (1.0 + std::abs(a.to_complex())) / std::abs(lam.to_complex())
                + (1.0 + std::abs(b.to_complex())) / std::abs(chi.to_complex()) + 2.0;
        pw_prev = pw;
    }
    out.value = mul(mul(out.q_val, out.p_val), out.r_val);
    out.rel_rounding = kUnitExtended * (8.0 * cond + 16.0 * m_cut);
    return out;
}

cdouble require_finite(const ScaledComplex& v, const char* what) {
    if (!v.fits_binary64()) throw RangeError(std::string(what) + " overflows binary64");
    return v.to_complex();
}

} // namespace

int coefficient_sign(const QParam& q, long long j) {
    if (q.value() > 0.0) return 1;
    const long long r = j % 4;
    return (r == 1 || r == 2) ? -1 : 1;
}

double log_max_term(const QParam& q, double abs_x) {
    if (abs_x <= 0.0) return 0.0;
    const double a = std::log(q.abs());
    const double l = std::log(abs_x);
    const double jstar = -l / a - 0.5;
    double best = 0.0; // j = 0
    for (double j : {std::floor(jstar), std::ceil(jstar)}) {
        if (j < 0.0) continue;
        best = std::max(best, j * (j + 1.0) / 2.0 * a + j * l);
    }
    return best;
}

int truncation_degree(const QParam& q, double radius, double eps) {
    if (!(radius > 1.0)) throw DomainError("truncation radius must exceed 1");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    return truncate_series(q, radius, eps).degree;
}

ScaledEvalOutput theta_scaled(const QParam& q, cdouble x, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    const double ax = std::abs(x);
    const Truncation tr = truncate_series(q, std::max(ax, 1.01), eps);
    ScaledEvalOutput out;
    out.tail_bound = tr.bound;
    out.terms_used = tr.degree + 1;
    if (ax == 0.0) {
        out.value = ScaledComplex(cdouble(1.0, 0.0));
        out.log_rounding_bound = -std::numeric_limits<double>::infinity();
        return out;
    }

    const double a = std::log(q.abs());
    const double l = std::log(ax);
    const auto log_term = [&](long long j) {
        const double jd = static_cast<double>(j);
        return static_cast<double>(j * (j + 1) / 2) * a + jd * l;
    };
    double log_max = 0.0;
    for (long long j = 0; j <= tr.degree; ++j) log_max = std::max(log_max, log_term(j));

    CompensatedSum sum;
    double err = 0.0;
    for (long long j = 0; j <= tr.degree; ++j) {
        const double lt = log_term(j);
        const double rel = lt - log_max;
        if (rel < kLogTiny) continue;
        const double mag = std::exp(rel);
        sum.add(static_cast<double>(coefficient_sign(q, j)) * mag * unit_power(x, j));
        const double jd = static_cast<double>(j);
        err += mag * (4.0 + jd + std::abs(static_cast<double>(j * (j + 1) / 2) * a) + std::abs(jd * l));
    }
    err = err * kUnit + 2.0 * kUnit * std::abs(sum.value());
    out.value = ScaledComplex(sum.value()) * scaled_exp(log_max);
    out.log_rounding_bound = std::log(err) + log_max;
    return out;
}

EvalOutput theta(const QParam& q, cdouble x, double eps, Precision precision) {
    if (precision == Precision::binary64) {
        const ScaledEvalOutput s = theta_scaled(q, x, eps);
        EvalOutput out;
        out.value = require_finite(s.value, "theta");
        out.tail_bound = s.tail_bound;
        out.terms_used = s.terms_used;
        out.rounding_bound = exp_or_inf(s.log_rounding_bound);
        return out;
    }

    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    const double ax = std::abs(x);
    const Truncation tr = truncate_series(q, std::max(ax, 1.01), eps);
    EvalOutput out;
    out.tail_bound = tr.bound;
    out.terms_used = tr.degree + 1;
    if (ax == 0.0) {
        out.value = 1.0;
        return out;
    }
    const double log_max = log_max_term(q, ax);
    const std::int64_t ref = exponent_for_log(log_max);

    // Terms by the recurrence t_j = t_{j-1} * q^j * x, all in double-double.
    const ScaledDD qs = make_scaled_dd(ComplexDD(DoubleDouble(q.value()), {}));
    const ScaledDD xs = make_scaled_dd(ComplexDD(x));
    ScaledDD qpow = make_scaled_dd(ComplexDD(DoubleDouble(1.0), {}));
    ScaledDD term = qpow;
    ComplexDD acc = align(term, ref);
    double abs_sum = std::abs(acc.to_complex());
    for (int j = 1; j <= tr.degree; ++j) {
        qpow = mul(qpow, qs);
        term = mul(term, mul(qpow, xs));
        const ComplexDD t = align(term, ref);
        acc = acc + t;
        abs_sum += std::abs(t.to_complex()) * (j + 2);
    }
    const ScaledComplex v(acc.to_complex(), ref);
    out.value = require_finite(v, "theta");
    out.rounding_bound = exp_or_inf(std::log(std::max(abs_sum, 1e-300) * 8.0 * kUnitExtended) + static_cast<double>(ref) * std::numbers::ln2)
                         + 2.0 * kUnit * std::abs(out.value);
    return out;
}

ThetaStarOutput theta_star(const QParam& q, cdouble x, Precision precision) {
    if (x == cdouble{}) throw DomainError("Theta* is undefined at x = 0");
    ThetaStarOutput out;
    if (precision == Precision::binary64) {
        const ProductResult pr = triple_product(q, x);
        out.eval.value = require_finite(pr.value, "Theta*");
        const double mag = std::abs(out.eval.value);
        out.eval.tail_bound = pr.rel_tail * mag;
        out.eval.rounding_bound = pr.rel_rounding * mag;
        out.eval.terms_used = pr.m_cut;
        out.factors.Q_val = pr.q_val;
        out.factors.P_val = require_finite(pr.p_val, "P");
        out.factors.R_val = require_finite(pr.r_val, "R");
        out.factors.truncation_m = pr.m_cut;
        out.factors.factor_tail_bound = pr.rel_tail;
        return out;
    }
    const ProductResultDD pr = triple_product_dd(q, x);
    const ScaledComplex value = to_scaled(pr.value);
    out.eval.value = require_finite(value, "Theta*");
    const double mag = std::abs(out.eval.value);
    out.eval.tail_bound = pr.rel_tail * mag;
    // The final rounding to binary64 dominates the double-double error.
    out.eval.rounding_bound = (pr.rel_rounding + 2.0 * kUnit) * mag;
    out.eval.terms_used = pr.m_cut;
    out.factors.Q_val = to_scaled(pr.q_val).to_complex().real();
    out.factors.P_val = require_finite(to_scaled(pr.p_val), "P");
    out.factors.R_val = require_finite(to_scaled(pr.r_val), "R");
    out.factors.truncation_m = pr.m_cut;
    out.factors.factor_tail_bound = pr.rel_tail;
    return out;
}

EvalOutput tail_g(const QParam& q, cdouble x, Precision precision) {
    const double ax = std::abs(x);
    if (!(ax > 1.0)) throw DomainError("G requires |x| > 1");
    const double aq = q.abs();
    const double target = 1e-17 / ax;

    EvalOutput out;
    if (precision == Precision::binary64) {
        CompensatedSum sum;
        cdouble term = 1.0 / x; // q^{i(i-1)/2} x^{-i} for i = 1
        double pw = 1.0;        // q^{i-1}
        double err = 0.0;
        for (int i = 1; i <= kMaxTerms; ++i) {
            sum.add(term);
            err += (i + 3) * std::abs(term);
            pw *= q.value();
            const double next = std::abs(term) * std::abs(pw) / ax;
            const double ratio = std::abs(pw) * aq / ax;
            const double bound = next / (1.0 - ratio);
            if (bound <= target || next == 0.0) {
                out.value = sum.value();
                out.tail_bound = bound;
                out.terms_used = i;
                out.rounding_bound = kUnit * err + 2.0 * kUnit * std::abs(out.value);
                return out;
            }
            term = term * pw / x;
        }
        throw PrecisionBudgetExceeded("G truncation exceeds the hard cap");
    }

    const ComplexDD xd(x);
    const ComplexDD one(DoubleDouble(1.0), {});
    ComplexDD term = one / xd;
    ComplexDD acc{};
    DoubleDouble pw(1.0);
    double abs_sum = 0.0;
    for (int i = 1; i <= kMaxTerms; ++i) {
        acc = acc + term;
        const double at = std::abs(term.to_complex());
        abs_sum += (i + 3) * at;
        pw = pw * DoubleDouble(q.value());
        const double apw = std::abs(pw.to_double());
        const double next = at * apw / ax;
        const double bound = next / (1.0 - apw * aq / ax);
        if (bound <= target || next == 0.0) {
            out.value = acc.to_complex();
            out.tail_bound = bound;
            out.terms_used = i;
            out.rounding_bound = 8.0 * kUnitExtended * abs_sum + 2.0 * kUnit * std::abs(out.value);
            return out;
        }
        term = term * ComplexDD(pw, {}) / xd;
    }
    throw PrecisionBudgetExceeded("G truncation exceeds the hard cap");
}

double g_bound(cdouble x) {
    const double ax = std::abs(x);
    if (!(ax > 1.0)) throw DomainError("the majorant of G requires |x| > 1");
    return 1.0 / (ax - 1.0);
}

ThetaFunction::ThetaFunction(const QParam& q) : q_(q) {
    powers_.push_back(1.0);
    double pw = 1.0;
    double prod = 1.0;
    while (powers_.size() < static_cast<std::size_t>(kMaxTerms) + 2) {
        pw *= q.value();
        if (std::abs(pw) < 1e-300) break;
        powers_.push_back(pw);
        if (std::abs(pw) > 1e-18) prod *= 1.0 - pw;
    }
    q_product_ = prod;
}

ThetaValue ThetaFunction::operator()(cdouble x) const {
    return std::abs(x) <= 1.0 ? series(x) : split(x);
}

ThetaValue ThetaFunction::series(cdouble x) const {
    // u_j = q^{j(j+1)/2} x^{j-1};  theta = 1 + sum u_j x,  theta' = sum j u_j.
    CompensatedSum val;
    CompensatedSum der;
    val.add(1.0);
    cdouble u = q_.value();
    double abs_sum = 1.0;
    const double ax = std::abs(x);
    for (std::size_t j = 1; j < powers_.size(); ++j) {
        const cdouble t = u * x;
        val.add(t);
        der.add(static_cast<double>(j) * u);
        abs_sum += (static_cast<double>(j) + 3.0) * std::abs(t);
        if (j + 1 >= powers_.size()) break;
        const double ratio = std::abs(powers_[j + 1]) * ax;
        if (std::abs(u) * ratio * (j + 2) < 1e-20 * (1.0 - ratio)) break;
        u *= powers_[j + 1] * x;
    }
    ThetaValue out;
    out.value = ScaledComplex(val.value());
    out.derivative = ScaledComplex(der.value());
    out.log_error = std::log(kUnit * abs_sum + 1e-300);
    return out;
}

std::pair<ScaledComplex, cdouble> ThetaFunction::theta_star_with_log_derivative(cdouble x) const {
    if (x == cdouble{}) throw DomainError("Theta* is undefined at x = 0");
    const double ax = std::abs(x);
    const auto [m_cut, rel_tail] = product_cut(q_.abs(), ax);
    (void)rel_tail;
    if (static_cast<std::size_t>(m_cut) >= powers_.size())
        throw PrecisionBudgetExceeded("triple product length exceeds the power table");

    cdouble acc(1.0, 0.0);
    std::int64_t exp2 = 0;
    cdouble logd{};
    for (int m = 1; m <= m_cut; ++m) {
        const double pw = powers_[m];
        const double pw_prev = powers_[m - 1];
        cdouble lam = 1.0 + x * pw;
        const cdouble b = pw_prev / x;
        cdouble chi = 1.0 + b;
        // An exactly vanishing factor only happens when x is exactly -q^{-m}
        // or -q^{m-1}; nudge by one ulp so the log-derivative stays finite.
        if (lam == cdouble{}) lam = cdouble(0.0, 0x1p-60);
        if (chi == cdouble{}) chi = cdouble(0.0, 0x1p-60);
        acc *= lam * chi;
        logd += pw / lam - (b / x) / chi;
        const double mag = std::max(std::abs(acc.real()), std::abs(acc.imag()));
        if (mag > 1e150 || mag < 1e-150) {
            int e = 0;
            std::frexp(mag, &e);
            acc = {std::ldexp(acc.real(), -e), std::ldexp(acc.imag(), -e)};
            exp2 += e;
        }
    }
    return {ScaledComplex(acc * q_product_, exp2), logd};
}

ThetaValue ThetaFunction::split(cdouble x) const {
    const auto [star, logd] = theta_star_with_log_derivative(x);
    const double ax = std::abs(x);

    // G and G' by the recurrence s_i = s_{i-1} q^{i-1} / x.
    CompensatedSum g;
    CompensatedSum gd;
    cdouble s = 1.0 / x;
    double abs_sum = 0.0;
    for (std::size_t i = 1; i < powers_.size(); ++i) {
        g.add(s);
        gd.add(-static_cast<double>(i) * s / x);
        abs_sum += (static_cast<double>(i) + 3.0) * std::abs(s);
        const double pw = powers_[i];
        const double next = std::abs(s) * std::abs(pw) / ax;
        if (next * (i + 2) < 1e-20 / ax || next == 0.0) break;
        s *= pw / x;
    }

    // Relative rounding of Theta* from conditioning of the factors.
    double cond = 0.0;
    const auto [m_cut, unused] = product_cut(q_.abs(), ax);
    (void)unused;
    for (int m = 1; m <= m_cut; ++m) {
        const cdouble a = x * powers_[m];
        const cdouble b = powers_[m - 1] / x;
        cond += (1.0 + std::abs(a)) / std::abs(1.0 + a) + (1.0 + std::abs(b)) / std::abs(1.0 + b);
        if (std::abs(a) < 1e-3 && std::abs(b) < 1e-3) {
            cond += 2.0 * (m_cut - m);
            break;
        }
    }

    ThetaValue out;
    out.value = star - ScaledComplex(g.value());
    out.derivative = star * ScaledComplex(logd) - ScaledComplex(gd.value());
    const double log_star_err = std::log(kUnit * (4.0 * cond + 8.0)) + star.log_abs();
    out.log_error = log_sum_exp(log_star_err, std::log(kUnit * abs_sum + 1e-300));
    return out;
}

} // namespace ptheta
