#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gerw/bounds.hpp"
#include "gerw/errors.hpp"
#include "ledger_oracle.hpp"

using namespace gerw;
using namespace gerw::bounds;

TEST_CASE("theta1 examples") {
    CHECK(theta1(10, 1, 1, 0) == doctest::Approx(1.0 / 18).epsilon(1e-15));
    CHECK(theta1(1e-9, 1, 1, 0) == 1e-9);
    const double want = static_cast<double>(
        pow((oracle::big(1) / 3 - pow(oracle::big(2), oracle::big("0.9")) / 3) * oracle::big("0.5"), 2) / 8);
    CHECK(theta1(1, 2, 0.5, 0.1) == doctest::Approx(want).epsilon(1e-14));
    CHECK(theta1(1, 2, 0.5, 0.1) == doctest::Approx(2.604e-3).epsilon(1e-3));
}

TEST_CASE("theta2 and the ledger on fixed inputs") {
    CHECK(theta2(0.05, 0.1, 0.02) == 0.05);
    CHECK(theta2(1.0, 0.1, 0.02) == doctest::Approx(0.16));

    LedgerInputs in;
    in.alpha = 0.1;
    in.beta = 0.02;
    const auto t = psi_ledger(in);
    CHECK(t.theta == doctest::Approx(0.08));
    CHECK(t.delta == doctest::Approx(1.1136).epsilon(1e-12));
    CHECK(t.delta > 1.0);
    CHECK(t.theta2 == 0.05);
    CHECK(t.phi1 == doctest::Approx(0.08));
    CHECK(t.log_psi <= std::log(in.c_slack));
    CHECK(t.chain_ok);
    CHECK(t.one_seventh_at_final.passes);
}

TEST_CASE("ledger rejects bad regimes") {
    LedgerInputs in;
    in.beta = 0.2;
    CHECK_THROWS_AS(psi_ledger(in), Error);
    in.beta = 0.1;
    in.alpha = 0.17;
    CHECK_THROWS_AS(psi_ledger(in), Error);
    in.alpha = 0.15;
    in.lambda = 1.0;
    CHECK_THROWS_AS(psi_ledger(in), Error);
}

TEST_CASE("ledger against the 50-digit oracle") {
    std::mt19937_64 gen(2024);
    for (int i = 0; i < 200; ++i) {
        const auto in = oracle::random_inputs(gen);
        const auto t = psi_ledger(in);
        const auto o = oracle::ledger(in);
        CHECK(oracle::max_discrepancy(t, o) < 1e-10);
        CHECK(t.theta1 <= in.gamma1);
        CHECK(t.theta2 <= in.gamma2);
        CHECK(t.theta2 <= 2 * (in.alpha - in.beta) + 1e-15);
        CHECK(t.chain_ok);
        CHECK(t.log_m_one_seventh > t.log_eta);
    }
}

TEST_CASE("m_k sequence") {
    const auto a = mk_sequence(400, 0.3, 1.5, 4);
    CHECK(a.terms[0] == 0.0);
    CHECK(a.terms[1] == doctest::Approx(400));
    CHECK(a.terms[2] == doctest::Approx(800).epsilon(1e-12));
    CHECK(a.criterion);
    CHECK(a.increasing);

    const auto b = mk_sequence(10, 0.3, 1.2, 4);
    CHECK(b.terms[2] == doctest::Approx(0.1 * std::pow(10, 1.2)));
    CHECK(b.terms[2] < 10);
    CHECK_FALSE(b.criterion);
    CHECK_FALSE(b.increasing);

    // ratio law m_{k+1}/m_k = (m_k/m_{k-1})^delta
    const auto c = mk_sequence(50, 0.5, 1.3, 6);
    for (std::size_t k = 2; k + 1 < c.log_terms.size(); ++k) {
        const double lhs = c.log_terms[k + 1] - c.log_terms[k];
        const double rhs = 1.3 * (c.log_terms[k] - c.log_terms[k - 1]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }

    // overflow goes to +inf while the logs stay finite
    const auto d = mk_sequence(1e200, 0.5, 1.5, 3);
    CHECK(std::isinf(d.terms[3]));
    CHECK(std::isfinite(d.log_terms[3]));
}

TEST_CASE("m_k monotonicity matches the criterion") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> lm(0.0, 30.0), lam(0.01, 0.99), del(1.001, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const auto s = mk_sequence_log(lm(gen), lam(gen), del(gen), 6);
        REQUIRE(s.increasing == s.criterion);
    }
}

TEST_CASE("azuma tail") {
    CHECK(azuma_tail(0, 10, 2) == 1.0);
    const double n = 1e6, K = 2;
    CHECK(azuma_tail(n * K, 1000000, K) == doctest::Approx(static_cast<double>(exp(-oracle::big(n) / 2))));
    // the chain exp(-m^theta / 2K^2) at t = m_k, n = m_k^(2 - theta)
    const double mk = 1e4, th = 0.05;
    const auto steps = static_cast<std::uint64_t>(std::pow(mk, 2 - th));
    CHECK(azuma_tail(mk, steps, K) == doctest::Approx(std::exp(-mk * mk / (2 * K * K * double(steps)))));
    CHECK(azuma_tail(mk, steps, K) == doctest::Approx(std::exp(-std::pow(mk, th) / (2 * K * K))).epsilon(1e-6));
}

TEST_CASE("incomplete gamma closed forms") {
    for (double x : {0.0, 1.0, 10.0}) CHECK(incomplete_gamma(1, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    CHECK(incomplete_gamma(2, 1) == doctest::Approx(0.7357588823).epsilon(1e-10));
    CHECK(incomplete_gamma(0.5, 0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(incomplete_gamma(0, 1), Error);
}

TEST_CASE("incomplete gamma against quadrature and boost") {
    boost::math::quadrature::exp_sinh<double> integrator;
    for (double s : {0.3, 1.7, 5.0, 12.5, 60.0}) {
        for (double x : {0.05, 0.9, 4.0, 20.0, 70.0}) {
            const double q = integrator.integrate([&](double t) { return std::exp((s - 1) * std::log(t + x) - (t + x)); });
            const double b = boost::math::tgamma(s, x);
            CHECK(incomplete_gamma(s, x) == doctest::Approx(b).epsilon(1e-12));
            if (q > 1e-250) CHECK(incomplete_gamma(s, x) == doctest::Approx(q).epsilon(1e-8));
            CHECK(log_incomplete_gamma(s, x) == doctest::Approx(std::log(b)).epsilon(1e-12));
        }
    }
    // far below double range
    CHECK(log_incomplete_gamma(3, 1e5) == doctest::Approx(-1e5 + 2 * std::log(1e5)).epsilon(1e-9));
}

TEST_CASE("tail bound forms") {
    CHECK(range_tail_bound(100, 1, 1) == doctest::Approx(std::exp(-100.0)).epsilon(1e-14));
    CHECK(local_time_tail_bound(16, 0.5, 0.5) == doctest::Approx(std::exp(-2.0)));
    double prev = position_tail_bound(1e2, 1, 0.5);
    for (double n = 1e3; n <= 1e5; n *= 10) {
        const double v = position_tail_bound(n, 1, 0.5);
        CHECK(v < prev);
        prev = v;
    }
    const oracle::big n = 10000;
    const oracle::big want = (2 * n + 1) * exp(-pow(n, oracle::big("0.025"))) +
                             pow(n, oracle::big("0.85")) / 2 * exp(-pow(n, oracle::big("0.05")));
    CHECK(range_event_bound(1e4, 1, 1, 1, 0.1, 0.05) == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
    bool vac = false;
    CHECK(as_probability(range_event_bound(1e4, 1, 1, 1, 0.1, 0.05), &vac) == 1.0);
    CHECK(vac);
    CHECK(as_probability(0.3, &vac) == 0.3);
    CHECK_FALSE(vac);
}

TEST_CASE("one-seventh check") {
    const double th = 0.08, t1 = 9.63e-4, p1 = 0.08;
    const double infl = log_inflection_point(th, t1, p1);
    CHECK_FALSE(check_one_seventh_log(infl - 1, th, t1, p1).applicable);
    CHECK_FALSE(check_one_seventh_log(infl - 1, th, t1, p1).passes);
    const double lm = minimal_log_m_one_seventh(th, t1, p1);
    CHECK(lm > infl);
    CHECK(check_one_seventh_log(lm, th, t1, p1).passes);
    const auto half = check_one_seventh_log(lm - std::log(2.0), th, t1, p1);
    CHECK((!half.applicable || !half.passes));
    // lhs decreases beyond the inflection point
    double prev = check_one_seventh_log(infl + 0.01, th, t1, p1).log_lhs;
    for (double x = infl + 1; x < infl + 200; x += 7) {
        const double v = check_one_seventh_log(x, th, t1, p1).log_lhs;
        CHECK(v < prev);
        prev = v;
    }
    CHECK(check_one_seventh(std::exp(infl + 100), th, t1, p1).passes);
}
