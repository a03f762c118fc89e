// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "ptheta/bounds.hpp"
#include "ptheta/errors.hpp"
#include "ptheta/region.hpp"
#include "ptheta/spectrum.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zero_finder.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ptheta;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > time_limit_s) {
        o.pass = false;
        o.detail << " [runtime " << dt << " s exceeds " << time_limit_s << " s]";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), dt,
                o.detail.str().c_str());
    std::fflush(stdout);
}

std::vector<double> grid(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

// A value printed as "d.ddd..." matches when it agrees to relative 5e-3 or
// when truncating the computed value to the printed decimals reproduces it.
bool matches_printed(double computed, double printed, int decimals) {
    if (std::abs(computed - printed) <= 5e-3 * std::abs(printed)) return true;
    const double scale = std::pow(10.0, decimals);
    return std::trunc(computed * scale) == std::round(printed * scale);
}

void spectral_values(Outcome& o) {
    struct Case {
        Regime regime;
        int j;
        std::pair<double, double> bracket;
        double q_expected, q_tol, x_expected, x_tol;
    };
    const Case cases[] = {
        {Regime::positive, 1, {0.25, 0.40}, 0.3092, 1e-3, -7.5, 0.1},
        {Regime::positive, 2, {0.40, 0.53}, 0.5169, 1e-3, NAN, 0.0},
        {Regime::negative, 1, {-0.80, -0.60}, -0.727133, 1e-4, -2.9, 0.1},
        {Regime::negative, 2, {-0.80, -0.75}, NAN, 0.0, 2.9, 0.1},
    };
    for (const Case& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const SpectralValue sv = find_spectral_value(c.regime, c.j, c.bracket);
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string tag = std::string(c.regime == Regime::positive ? "q~" : "q-") + std::to_string(c.j);
        o.detail << " " << tag << "=" << sv.q_value << " x=" << sv.double_zero_x;
        if (!std::isnan(c.q_expected)) o.require(std::abs(sv.q_value - c.q_expected) <= c.q_tol, tag + " value");
        if (!std::isnan(c.x_expected))
            o.require(std::abs(sv.double_zero_x - c.x_expected) <= c.x_tol, tag + " double zero");
        o.require(sv.in_interval, tag + " double zero interval");
        o.require(dt < 30.0, tag + " runtime");
    }
}

void constants_reproduced(Outcome& o) {
    struct Line {
        double q;
        int nu;
        double printed;
    };
    const Line lines[] = {{constants::kFirstPositiveSpectral, 4, -196.7},
                          {0.5, 4, -22.6},
                          {0.5, 12, -5792.6},
                          {0.56, 12, -1404.9},
                          {0.56, 14, -4479.9},
                          {0.6, 14, -1647.4},
                          {0.6, 16, -4576.1},
                          {0.63, 16, -2045.8},
                          {0.63, 18, -5154.6},
                          {2.0 / 3.0, 18, -1810.0}};
    for (const Line& l : lines) {
        const double a = line_abscissa(QParam::make(l.q), l.nu);
        o.require(matches_printed(a, l.printed, 1), "L_" + std::to_string(l.nu) + " = " + std::to_string(a));
    }
    o.require(matches_printed(gamma_n(6), 1225.1, 1), "gamma_6");
    o.require(matches_printed(gamma_n(13), 89.9, 1), "gamma_13");
    const double b_printed[] = {-5792.6, -804.4, -364.1, -236.7};
    for (int n = 2; n <= 5; ++n) o.require(matches_printed(b_n(n), b_printed[n - 2], 1), "b_" + std::to_string(n));

    const Lemma1Report r = lemma1_chain(1);
    o.require(matches_printed(r.Q_lower, 0.288, 3), "Q(1/2)");
    o.require(matches_printed(r.P_flat_or_sharp, 36.3, 1), "P_flat");
    o.require(matches_printed(r.P_dagger, 0.129, 3), "P_dagger");
    o.require(matches_printed(r.product_lower, 4.68, 2), "P_flat P_dagger bound");
    o.require(r.P_flat_or_sharp * r.P_dagger > r.product_lower, "P_flat P_dagger above its bound");
    o.require(matches_printed(r.theta_star_lower, 0.388, 3), "Theta* lower bound");
    o.require(matches_printed(r.g_upper, 0.046, 3), "G majorant");
    o.detail << " gamma6=" << gamma_n(6) << " b2=" << b_n(2) << " Q=" << r.Q_lower << " Pflat=" << r.P_flat_or_sharp
             << " Pdagger=" << r.P_dagger << " product bound=" << r.product_lower << " low=" << r.theta_star_lower << " g=" << r.g_upper;
}

void identity_suite(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lr(std::log(1.5), std::log(100.0));
    std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
    const double qs[] = {0.3, -0.3, 0.5, -0.5, 0.7, -0.7, 0.9, -0.9};
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const QParam q = QParam::make(qs[i % 8]);
        const cdouble x = std::polar(std::exp(lr(rng)), ph(rng));
        const EvalOutput a = theta(q, x);
        const ThetaStarOutput b = theta_star(q, x);
        const EvalOutput c = tail_g(q, x);
        const double bound = a.tail_bound + a.rounding_bound + b.eval.tail_bound + b.eval.rounding_bound
                             + c.tail_bound + c.rounding_bound;
        const double diff = std::abs(a.value - (b.eval.value - c.value));
        worst = std::max(worst, diff / bound);
        if (!(diff <= bound)) ++bad;
    }
    o.detail << " samples=1000 worst residual/bound=" << worst;
    o.require(bad == 0, std::to_string(bad) + " samples outside bounds");
}

void annulus_law(Outcome& o) {
    for (double qv : {0.2, -0.2, 0.25, -0.25}) {
        const QParam q = QParam::make(qv);
        const ZeroSet zs = find_zeros_in_disk(q, 10);
        o.require(zs.multiplicity_sum() == zs.argument_count, "count match q=" + std::to_string(qv));
        for (int k = 5; k <= 10; ++k) {
            int roots = 0;
            for (const Zero& z : zs.zeros)
                if (z.annulus_k == k) roots += z.multiplicity;
            const int by_argument = count_zeros_in_circle(q, k) - count_zeros_in_circle(q, k - 1);
            o.require(roots == 1 && by_argument == 1,
                      "annulus k=" + std::to_string(k) + " q=" + std::to_string(qv));
        }
    }
    o.detail << " q in {+-0.2, +-0.25}, k = 5..10";
}

void ccp_census(Outcome& o) {
    const double q1 = constants::kFirstPositiveSpectral;
    const double q2 = 0.5169593598;
    const double qn = constants::kFirstNegativeSpectral;
    for (double q : grid(0.02, q1 - 1e-5, 12)) o.require(count_ccps(QParam::make(q)) == 0, "q=" + std::to_string(q));
    for (double q : grid(q1 + 1e-5, q2 - 1e-5, 12)) o.require(count_ccps(QParam::make(q)) == 1, "q=" + std::to_string(q));
    o.require(count_ccps(QParam::make(0.55)) == 2, "q=0.55");
    for (double q : grid(qn + 1e-5, -0.02, 12)) o.require(count_ccps(QParam::make(q)) == 0, "q=" + std::to_string(q));
    o.detail << " 0 on (0, q~1], 1 on (q~1, q~2], 2 at 0.55, 0 on [q-1, 0)";
}

void zero_free_lines(Outcome& o) {
    int checked = 0;
    double min_margin = INFINITY;
    const auto check = [&](double qv, int nu, LineSide side) {
        const LineCheckReport r = check_line(make_line_spec(QParam::make(qv), nu, side, false));
        ++checked;
        min_margin = std::min(min_margin, std::min(r.margin, r.sampled_min_gap));
        o.require(r.pass && r.margin > 0.0 && r.sampled_min_gap > 0.0,
                  "q=" + std::to_string(qv) + " nu=" + std::to_string(nu));
    };
    for (int n = 1; n <= 10; ++n) {
        const int l = first_line_index(Regime::positive, n);
        for (double q : grid(constants::kFirstPositiveSpectral, interval_outer_end(Regime::positive, n), 20))
            for (int nu = l; nu <= l + 2; ++nu) check(q, nu, LineSide::left);
    }
    for (int n = 3; n <= 10; ++n) {
        const int l = first_line_index(Regime::negative, n);
        for (double q : grid(interval_outer_end(Regime::negative, n), constants::kFirstNegativeSpectral, 20))
            for (int nu = l; nu <= l + 2; ++nu)
                for (LineSide s : {LineSide::left, LineSide::right}) check(q, nu, s);
    }
    o.detail << " lines=" << checked << " min margin=" << min_margin;
}

void theorem_sweep(Outcome& o) {
    const double pos_extent = std::hypot(5792.7, 132.0);
    const double neg_extent = std::hypot(364.2, 132.0);
    for (RegionKind kind : {RegionKind::positive_q, RegionKind::negative_q}) {
        const bool positive = kind == RegionKind::positive_q;
        const RegionReport r = verify_containment(kind, positive ? grid(0.05, 0.95, 30) : grid(-0.95, -0.05, 30));
        o.require(r.pass, to_string(kind) + " violations=" + std::to_string(r.violations.size()));
        for (const RegionViolation& v : r.violations) o.detail << " {q=" << v.q << " " << v.reason << "}";
        for (const RegionSample& s : r.samples) {
            o.require(s.disk_radius > (positive ? pos_extent : neg_extent), "census disk too small");
            for (cdouble z : s.ccps) {
                if (positive) {
                    o.require(z.real() > -5792.6, "CCP with Re x <= -5792.6");
                    o.require(z.real() < 0.0 || std::abs(z) < 18.0, "zero with Re x >= 0 outside |x| < 18");
                }
            }
            if (positive)
                for (double x : s.real_zeros) o.require(x < 0.0, "nonnegative real zero");
        }
        o.detail << " " << to_string(kind) << ": ccps=" << r.total_ccps << " max|Re|=" << r.max_re_magnitude_seen
                 << " max|Im|=" << r.max_im_seen;
    }
}

void lemma_chains(Outcome& o) {
    for (int n = 1; n <= 10; ++n) {
        const Lemma1Report r = lemma1_chain(n);
        o.require(r.pass, "n=" + std::to_string(n) + ": " + r.failing_link);
        for (const ChainLink& l : r.chain_values) o.require(l.holds, l.label);
        o.require(r.theta_star_actual > r.theta_star_lower, "n=" + std::to_string(n) + " sandwich");
    }
    o.detail << " n = 1..10";
}

} // namespace

int main() {
    criterion(1, "spectral values", 120.0, spectral_values);
    criterion(2, "printed constants", 60.0, constants_reproduced);
    criterion(3, "identity theta = Theta* - G", 10.0, identity_suite);
    criterion(4, "annulus law", 60.0, annulus_law);
    criterion(5, "CCP census", 60.0, ccp_census);
    criterion(6, "zero-free lines", 120.0, zero_free_lines);
    criterion(7, "theorem sweep", 600.0, theorem_sweep);
    criterion(8, "lower-bound chains", 60.0, lemma_chains);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
