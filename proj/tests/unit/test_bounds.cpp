#include "doctest.h"

#include "ptheta/bounds.hpp"
#include "ptheta/errors.hpp"
#include "ptheta/zero_finder.hpp"

#include <cmath>
#include <numbers>

using namespace ptheta;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

} // namespace

TEST_SUITE("bound_verifier") {

TEST_CASE("line abscissas") {
    CHECK(rel_close(line_abscissa(QParam::make(0.5), 12), -5792.61, 1e-5));
    CHECK(rel_close(line_abscissa(QParam::make(0.5), 4), -22.627, 1e-4));
    CHECK(rel_close(line_abscissa(QParam::make(2.0 / 3.0), 18), -1810.0, 1e-4));
    for (double q : {0.3, -0.55, 0.9}) {
        for (int nu : {1, 7, 40}) {
            const long double ref = -std::pow(static_cast<long double>(std::abs(q)), -nu - 0.5L);
            CHECK(std::abs((line_abscissa(QParam::make(q), nu) - ref) / ref) < 1e-14L);
        }
    }
    CHECK_THROWS_AS((void)line_abscissa(QParam::make(0.5), 0), DomainError);
    CHECK_THROWS_AS((void)line_abscissa(QParam::make(1e-6), 60), RangeError);
}

TEST_CASE("line specs") {
    CHECK_THROWS_AS((void)make_line_spec(QParam::make(0.5), 4, LineSide::right), DomainError);
    CHECK_THROWS_AS((void)make_line_spec(QParam::make(0.6), 4, LineSide::left), DomainError);
    CHECK_NOTHROW((void)make_line_spec(QParam::make(0.6), 4, LineSide::left, false));
    const LineSpec r = make_line_spec(QParam::make(-0.75), 16, LineSide::right);
    CHECK(r.abscissa == doctest::Approx(std::pow(0.75, -16.5)));
}

TEST_CASE("check_line at the documented points") {
    const LineCheckReport a = check_line(make_line_spec(QParam::make(0.5), 4, LineSide::left));
    CHECK(a.pass);
    CHECK(a.theta_star_at_axis > 0.388);
    CHECK(a.g_bound_at_axis == doctest::Approx(0.046237).epsilon(1e-4));
    CHECK(a.margin > 0.34);
    CHECK(a.axis_is_minimum);

    const LineCheckReport b =
        check_line(make_line_spec(QParam::make(constants::kFirstPositiveSpectral), 4, LineSide::left));
    CHECK(b.pass);
    CHECK(rel_close(b.spec.abscissa, -196.7, 5e-3));

    const QParam qn = QParam::make(-0.75);
    const int nu = first_line_index(qn.regime(), qn.n());
    for (LineSide side : {LineSide::left, LineSide::right}) {
        const LineCheckReport r = check_line(make_line_spec(qn, nu, side));
        CHECK(r.pass);
        CHECK(r.cross_sign_ok);
        CHECK(r.theta_star_at_axis > r.positive_counterpart);
    }

    CHECK_THROWS_AS((void)check_line(a.spec, 200.0, 63), DomainError);
}

TEST_CASE("zero-free lines on a coarse grid") {
    for (int n = 1; n <= 10; ++n) {
        const double lo = constants::kFirstPositiveSpectral;
        const double hi = interval_outer_end(Regime::positive, n);
        for (int i = 0; i < 5; ++i) {
            const QParam q = QParam::make(lo + (hi - lo) * i / 4.0);
            const int l = first_line_index(Regime::positive, n);
            for (int nu = l; nu <= l + 2; ++nu) {
                const LineCheckReport r = check_line(make_line_spec(q, nu, LineSide::left, false));
                CHECK(r.pass);
                CHECK(r.axis_is_minimum);
            }
        }
    }
}

TEST_CASE("found zeros stay off the checked lines") {
    for (double qv : {0.4, 0.6, 0.8, -0.75, -0.85}) {
        const QParam q = QParam::make(qv);
        const ZeroSet zs = find_zeros_in_disk(q, annulus_law_start(q) + 4);
        for (int nu = 1; nu <= zs.disk_k; ++nu) {
            const double a = line_abscissa(q, nu);
            for (const Zero& z : zs.zeros) {
                CHECK(std::abs(z.location.real() - a) > 1e-6 * (1.0 + std::abs(z.location)));
                CHECK(std::abs(z.location.real() + a) > 1e-6 * (1.0 + std::abs(z.location)));
            }
        }
    }
}

TEST_CASE("Lemma chain on the first interval") {
    const Lemma1Report r = lemma1_chain(1);
    CHECK(r.pass);
    CHECK(r.failing_link.empty());
    CHECK(r.Q_lower == doctest::Approx(0.288788).epsilon(1e-5));
    CHECK(r.P_flat_or_sharp == doctest::Approx(36.37).epsilon(1e-3));
    CHECK(r.P_dagger == doctest::Approx(0.1299).epsilon(1e-3));
    CHECK(r.product_lower == doctest::Approx(4.68).epsilon(1e-12));
    CHECK(r.P_flat_or_sharp * r.P_dagger > r.product_lower);
    CHECK(r.theta_star_lower == doctest::Approx(4.68 * 0.288 * 0.288).epsilon(1e-12));
    CHECK(r.g_upper == doctest::Approx(0.046237).epsilon(1e-4));
    CHECK(r.theta_star_actual > r.theta_star_lower);
    for (const ChainLink& l : r.chain_values) CHECK_MESSAGE(l.holds, l.label);
}

TEST_CASE("Lemma chains for n >= 2") {
    const Lemma1Report r2 = lemma1_chain(2);
    CHECK(r2.pass);
    CHECK(r2.theta_star_lower == doctest::Approx(std::exp(10.0) / 36.0).epsilon(1e-12));
    CHECK(r2.theta_star_lower == doctest::Approx(611.8).epsilon(1e-4));
    CHECK(r2.g_upper == doctest::Approx(1.0 / (std::exp(4.0) - 1.0)));
    for (int n = 3; n <= 12; ++n) {
        const Lemma1Report r = lemma1_chain(n);
        CHECK_MESSAGE(r.pass, r.failing_link);
        CHECK(r.theta_star_actual > r.theta_star_lower);
        CHECK(r.Q_lower == doctest::Approx(std::exp(-std::numbers::pi * std::numbers::pi * n / 6.0)));
    }
    CHECK_THROWS_AS((void)lemma1_chain(0), DomainError);
}

TEST_CASE("gamma_n and b_n") {
    CHECK(gamma_n(6) == doctest::Approx(1225.1).epsilon(1e-4));
    CHECK(gamma_n(13) == doctest::Approx(89.98).epsilon(1e-3));
    CHECK(gamma_n(7) < gamma_n(6));
    CHECK(gamma_decreasing(6, 30));
    CHECK_THROWS_AS((void)gamma_n(5), DomainError);

    CHECK(b_n(2) == doctest::Approx(-5792.6).epsilon(1e-4));
    CHECK(b_n(3) == doctest::Approx(-804.46).epsilon(1e-4));
    CHECK(b_n(4) == doctest::Approx(-364.12).epsilon(1e-4));
    CHECK(b_n(5) == doctest::Approx(-236.75).epsilon(1e-4));
    CHECK(b_increasing(2, 30));
    CHECK_THROWS_AS((void)b_n(1), DomainError);
    // b_2 is the abscissa of the line L_12(1/2).
    CHECK(b_n(2) == doctest::Approx(line_abscissa(QParam::make(0.5), 12)).epsilon(1e-14));
}

TEST_CASE("sequence facts") {
    const std::vector<ChainLink> facts = sequence_facts();
    CHECK(facts.size() >= 11);
    for (const ChainLink& l : facts) CHECK_MESSAGE(l.holds, l.label);
}

TEST_CASE("factor comparison parity") {
    for (double qs : {0.75, 0.85}) {
        for (int nu : {16, 20}) {
            for (int m = 1; m <= 12; ++m) {
                for (int s : {-1, 1}) {
                    for (double im : {0.0, 7.0, 130.0}) {
                        const FactorComparison c = factor_comparison(qs, nu, m, s, im);
                        CHECK(c.holds);
                        CHECK(c.mu_equal == (m % 2 == 0));
                        if (m % 2 == 1) {
                            CHECK(c.mu_B > 1.0);
                            CHECK(c.mu_A < 1.0);
                        }
                        CHECK(std::abs(c.lambda_B.real()) >= std::abs(c.lambda_A.real()) * (1 - 1e-13));
                        CHECK(std::abs(c.chi_B.real()) >= std::abs(c.chi_A.real()) * (1 - 1e-13));
                    }
                }
            }
        }
    }
    CHECK_THROWS_AS((void)factor_comparison(1.2, 16, 1, -1), DomainError);
    CHECK_THROWS_AS((void)factor_comparison(0.8, 16, 0, -1), DomainError);
    CHECK_THROWS_AS((void)factor_comparison(0.8, 16, 1, 0), DomainError);
}

TEST_CASE("factor products dominate") {
    for (int s : {-1, 1}) {
        for (double im : {0.0, 3.0, 100.0}) {
            const FactorProductComparison p = factor_product_comparison(0.8, 20, s, im);
            CHECK(p.holds);
            CHECK(p.product_B >= p.product_A);
            // With enough factors the truncated products reproduce |Theta*|.
            const FactorProductComparison full = factor_product_comparison(0.8, 20, s, im, 250);
            CHECK(full.theta_star_A == doctest::Approx(full.product_A).epsilon(1e-12));
            CHECK(full.theta_star_B == doctest::Approx(full.product_B).epsilon(1e-12));
        }
    }
}

} // TEST_SUITE
