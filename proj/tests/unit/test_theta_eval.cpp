#include "doctest.h"

#include "oracle.hpp"
#include "ptheta/errors.hpp"
#include "ptheta/theta_eval.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ptheta;

namespace {

constexpr double kTildeQ1 = constants::kFirstPositiveSpectral;

cdouble random_point(std::mt19937_64& rng, double r_lo, double r_hi) {
    std::uniform_real_distribution<double> lr(std::log(r_lo), std::log(r_hi));
    std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
    return std::polar(std::exp(lr(rng)), ph(rng));
}

// log of sum_{j=from}^{to} |q|^{j(j+1)/2} R^j, summed in the log domain.
double log_tail_sum(double q, double r, int from, int to) {
    double m = -INFINITY;
    std::vector<double> l;
    for (int j = from; j <= to; ++j) {
        l.push_back(0.5 * j * (j + 1.0) * std::log(std::abs(q)) + j * std::log(r));
        m = std::max(m, l.back());
    }
    double s = 0.0;
    for (double v : l) s += std::exp(v - m);
    return m + std::log(s);
}

} // namespace

TEST_SUITE("theta_eval") {

TEST_CASE("QParam validation and interval index") {
    CHECK_THROWS_AS(QParam::make(0.0), DomainError);
    CHECK_THROWS_AS(QParam::make(1.0), DomainError);
    CHECK_THROWS_AS(QParam::make(-1.0), DomainError);
    CHECK_THROWS_AS(QParam::make(std::nan("")), DomainError);

    CHECK(QParam::make(0.4).regime() == Regime::positive);
    CHECK(QParam::make(-0.4).regime() == Regime::negative);
    CHECK(QParam::make(0.4).n() == 1);
    CHECK(QParam::make(0.5).n() == 1);
    CHECK(QParam::make(0.6).n() == 2);
    CHECK(QParam::make(0.7).n() == 3);
    CHECK(QParam::make(0.9).n() == 9);
    CHECK(QParam::make(0.4).in_interval_family());
    CHECK_FALSE(QParam::make(0.2).in_interval_family());
    CHECK(QParam::make(-0.75).n() == 3);
    CHECK(QParam::make(-0.8).n() == 4);
    CHECK(QParam::make(-0.75).in_interval_family());
    CHECK_FALSE(QParam::make(-0.5).in_interval_family());

    CHECK(first_line_index(Regime::positive, 1) == 4);
    CHECK(first_line_index(Regime::positive, 2) == 12);
    CHECK(first_line_index(Regime::negative, 3) == 16);
    CHECK(interval_outer_end(Regime::positive, 1) == doctest::Approx(0.5));
    CHECK(interval_outer_end(Regime::negative, 3) == doctest::Approx(-0.75));

    CHECK_NOTHROW(QParam::make(0.98).require_supported());
    CHECK_THROWS_AS(QParam::make(0.99).require_supported(), PrecisionBudgetExceeded);
    CHECK_THROWS_AS(QParam::make(1e-7).require_supported(), PrecisionBudgetExceeded);
}

TEST_CASE("truncation_degree") {
    const int n = truncation_degree(QParam::make(0.5), 2.0, 1e-12);
    CHECK(n <= 12);
    CHECK(std::exp(log_tail_sum(0.5, 2.0, n + 1, 200)) <= 1e-12);
    // Minimality: one term fewer would leave a tail above eps.
    CHECK(std::exp(log_tail_sum(0.5, 2.0, n, 200)) > 1e-12);

    CHECK(truncation_degree(QParam::make(1e-6), 1.5, 1e-12) == 1);

    const int n9 = truncation_degree(QParam::make(0.9), 5792.7, 1e-10);
    CHECK(log_tail_sum(0.9, 5792.7, n9 + 1, n9 + 500) < std::log(1e-10));

    // Monotone in R and in |q|.
    const QParam q = QParam::make(0.7);
    int prev = 0;
    for (double r : {1.01, 2.0, 10.0, 100.0, 1e4}) {
        const int cur = truncation_degree(q, r, 1e-14);
        CHECK(cur >= prev);
        prev = cur;
    }
    prev = 0;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const int cur = truncation_degree(QParam::make(-a), 50.0, 1e-14);
        CHECK(cur >= prev);
        prev = cur;
    }

    CHECK_THROWS_AS((void)truncation_degree(q, 1.0, 1e-12), DomainError);
    CHECK_THROWS_AS((void)truncation_degree(q, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)truncation_degree(q, 2.0, 1.5), DomainError);
    CHECK_THROWS_AS((void)truncation_degree(QParam::make(0.999999), 1e300, 1e-15), PrecisionBudgetExceeded);
}

TEST_CASE("theta: exact values and oracle agreement") {
    for (double q : {0.3, -0.3, 0.9, -0.97}) {
        const EvalOutput e = theta(QParam::make(q), 0.0);
        CHECK(e.value == cdouble(1.0, 0.0));
    }

    const EvalOutput near_double = theta(QParam::make(kTildeQ1), -7.5);
    CHECK(std::abs(near_double.value) < 1e-2);

    const cdouble x(2.0, 3.0);
    const EvalOutput e = theta(QParam::make(0.5), x);
    const oracle::mpc ref = oracle::theta(0.5, x, 500);
    CHECK(e.tail_bound <= 1e-15);
    CHECK((oracle::mpc(e.value) - ref).abs() <= e.tail_bound + e.rounding_bound);

    std::mt19937_64 rng(7);
    for (double q : {0.3, -0.3, 0.5, -0.5, 0.7, -0.7}) {
        const QParam qp = QParam::make(q);
        for (int i = 0; i < 15; ++i) {
            const cdouble z = random_point(rng, 0.1, 60.0);
            const EvalOutput v = theta(qp, z, 1e-15);
            const double err = (oracle::mpc(v.value) - oracle::theta(q, z, 400)).abs();
            CHECK(err <= v.tail_bound + v.rounding_bound);
        }
    }
}

TEST_CASE("theta: tail bound honesty under doubled precision") {
    std::mt19937_64 rng(11);
    for (double q : {0.5, -0.7, 0.9}) {
        const QParam qp = QParam::make(q);
        for (int i = 0; i < 20; ++i) {
            const cdouble z = random_point(rng, 0.5, 40.0);
            const EvalOutput a = theta(qp, z, 1e-12);
            const EvalOutput b = theta(qp, z, 1e-15, Precision::extended);
            CHECK(std::abs(a.value - b.value) <= a.tail_bound + a.rounding_bound + b.tail_bound + b.rounding_bound);
        }
    }
}

TEST_CASE("theta: underflowing coefficients and large arguments") {
    const QParam q = QParam::make(0.05);
    const EvalOutput e = theta(q, cdouble(-1e6, 0.0));
    CHECK(std::isfinite(e.value.real()));
    const ScaledEvalOutput s = theta_scaled(QParam::make(0.5), cdouble(1e200, 0.0));
    CHECK(s.value.log_abs() > 460.0);
    CHECK_THROWS_AS((void)theta(QParam::make(0.5), cdouble(1e200, 0.0)), RangeError);
}

TEST_CASE("theta_star: factors, oracle, Lemma values") {
    const ThetaStarOutput s = theta_star(QParam::make(0.5), cdouble(-std::pow(2.0, 4.5), 0.0));
    CHECK(s.factors.Q_val == doctest::Approx(0.288788095).epsilon(1e-9));
    CHECK(static_cast<double>(oracle::q_product(0.5, 400)) == doctest::Approx(s.factors.Q_val).epsilon(1e-15));
    CHECK(std::abs(s.eval.value.imag()) <= 1e-15 * std::abs(s.eval.value));
    CHECK(std::abs(s.eval.value) > 0.388);
    const cdouble prod = s.factors.Q_val * s.factors.P_val * s.factors.R_val;
    CHECK(std::abs(prod - s.eval.value) <= 1e-15 * std::abs(prod));

    std::mt19937_64 rng(3);
    for (double q : {0.3, -0.3, 0.5, -0.5, 0.7, -0.7}) {
        const QParam qp = QParam::make(q);
        for (int i = 0; i < 15; ++i) {
            const cdouble z = random_point(rng, 1.5, 100.0);
            const ThetaStarOutput t = theta_star(qp, z);
            const double err = (oracle::mpc(t.eval.value) - oracle::theta_star(q, z, 500)).abs();
            CHECK(err <= t.eval.tail_bound + t.eval.rounding_bound);
        }
    }
    CHECK_THROWS_AS((void)theta_star(QParam::make(0.5), cdouble(0.0, 0.0)), DomainError);
}

TEST_CASE("theta_star: extended precision agrees") {
    std::mt19937_64 rng(5);
    for (double q : {0.6, -0.8}) {
        const QParam qp = QParam::make(q);
        for (int i = 0; i < 10; ++i) {
            const cdouble z = random_point(rng, 1.5, 1000.0);
            const ThetaStarOutput a = theta_star(qp, z);
            const ThetaStarOutput b = theta_star(qp, z, Precision::extended);
            CHECK(std::abs(a.eval.value - b.eval.value) <= a.eval.tail_bound + a.eval.rounding_bound
                                                               + b.eval.tail_bound + b.eval.rounding_bound);
        }
    }
}

TEST_CASE("tail_g and g_bound") {
    CHECK(g_bound(cdouble(2.0, 0.0)) == 1.0);
    CHECK(g_bound(cdouble(-std::pow(2.0, 12.5), 0.0)) == doctest::Approx(1.7266e-4).epsilon(1e-4));
    CHECK_THROWS_AS((void)g_bound(cdouble(0.5, 0.5)), DomainError);
    CHECK_THROWS_AS((void)tail_g(QParam::make(0.5), cdouble(1.0, 0.0)), DomainError);

    const cdouble x(-std::pow(2.0, 4.5), 0.0);
    const EvalOutput g = tail_g(QParam::make(0.5), x);
    CHECK(std::abs(g.value) <= 1.0 / (std::pow(2.0, 4.5) - 1.0));
    CHECK(1.0 / (std::pow(2.0, 4.5) - 1.0) == doctest::Approx(0.04624).epsilon(1e-3));

    CHECK(std::abs(tail_g(QParam::make(0.7), cdouble(1e12, 0.0)).value) < 1.1e-12);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uq(-0.98, 0.98);
    int checked = 0;
    while (checked < 1000) {
        const double q = uq(rng);
        if (std::abs(q) < 1e-3) continue;
        const cdouble z = random_point(rng, 1.0001, 1e4);
        CHECK(std::abs(tail_g(QParam::make(q), z).value) <= g_bound(z));
        ++checked;
    }

    for (double q : {0.5, -0.5, 0.9}) {
        for (int i = 0; i < 10; ++i) {
            const cdouble z = random_point(rng, 2.0, 50.0);
            const EvalOutput v = tail_g(QParam::make(q), z);
            CHECK((oracle::mpc(v.value) - oracle::tail_g(q, z, 500)).abs() <= v.tail_bound + v.rounding_bound);
        }
    }
}

TEST_CASE("identity theta = Theta* - G on 1000 samples") {
    std::mt19937_64 rng(17);
    const double qs[] = {0.3, -0.3, 0.5, -0.5, 0.7, -0.7, 0.9, -0.9};
    for (int i = 0; i < 1000; ++i) {
        const QParam q = QParam::make(qs[i % 8]);
        const cdouble z = random_point(rng, 1.5, 100.0);
        const EvalOutput a = theta(q, z);
        const ThetaStarOutput b = theta_star(q, z);
        const EvalOutput c = tail_g(q, z);
        const double bound = a.tail_bound + a.rounding_bound + b.eval.tail_bound + b.eval.rounding_bound
                             + c.tail_bound + c.rounding_bound;
        CHECK(std::abs(a.value - (b.eval.value - c.value)) <= bound);
    }
}

TEST_CASE("real arguments give real values") {
    for (double q : {0.4, -0.6, 0.95}) {
        const QParam qp = QParam::make(q);
        for (double x : {-37.0, -2.5, 1.7, 250.0}) {
            const cdouble v = theta(qp, x).value;
            const cdouble s = theta_star(qp, x).eval.value;
            const cdouble g = tail_g(qp, x).value;
            CHECK(std::abs(v.imag()) <= 1e-15 * std::abs(v));
            CHECK(std::abs(s.imag()) <= 1e-15 * std::abs(s));
            CHECK(std::abs(g.imag()) <= 1e-15 * std::abs(g));
        }
    }
}

TEST_CASE("line minimum property of Theta*") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> im(-200.0, 200.0);
    for (double q : {0.35, 0.5, 0.8}) {
        const QParam qp = QParam::make(q);
        for (int nu : {4, 6, 9}) {
            const double a = -std::pow(q, -nu - 0.5);
            const double axis = std::abs(theta_star(qp, a).eval.value);
            for (int i = 0; i < 100; ++i) {
                const double v = std::abs(theta_star(qp, cdouble(a, im(rng))).eval.value);
                CHECK(v >= axis * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("ThetaFunction matches the series and its derivative") {
    std::mt19937_64 rng(23);
    for (double q : {0.5, -0.7, 0.9}) {
        const ThetaFunction f(QParam::make(q));
        CHECK(f.q_product() == doctest::Approx(static_cast<double>(oracle::q_product(q, 2000))).epsilon(1e-13));
        for (int i = 0; i < 20; ++i) {
            const cdouble z = random_point(rng, 0.2, 30.0);
            const ThetaValue v = f(z);
            const oracle::mpc ref = oracle::theta(q, z, 500);
            const oracle::mpc dref = oracle::theta_prime(q, z, 500);
            const double scale = std::exp(log_max_term(QParam::make(q), std::abs(z)));
            CHECK((oracle::mpc(v.value.to_complex()) - ref).abs() <= 1e-12 * scale);
            CHECK((oracle::mpc(v.derivative.to_complex()) - dref).abs() <= 1e-9 * scale / std::min(1.0, std::abs(z)));
        }
    }
}

TEST_CASE("coefficient signs") {
    const QParam qn = QParam::make(-0.7);
    const int expected[] = {1, -1, -1, 1, 1, -1, -1, 1};
    for (int j = 0; j < 8; ++j) CHECK(coefficient_sign(qn, j) == expected[j]);
    for (int j = 0; j < 8; ++j) CHECK(coefficient_sign(QParam::make(0.7), j) == 1);
}

} // TEST_SUITE
