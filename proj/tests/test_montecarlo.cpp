#include "doctest.h"

#include <cmath>

#include "gerw/montecarlo.hpp"

using namespace gerw;
using namespace gerw::mc;

namespace {

WalkConfig make(KernelPtr k, std::uint64_t horizon, std::uint64_t seed, std::optional<DriftSchedule> s = std::nullopt) {
    WalkConfig c;
    c.kernel = std::move(k);
    c.schedule = s;
    c.horizon = horizon;
    c.seed = seed;
    return c;
}

const DriftSchedule kSched(0.5, 0.1, 1);

} // namespace

TEST_CASE("wilson interval") {
    const auto a = wilson(0, 100);
    CHECK(a.low == 0.0);
    CHECK(a.high > 0.0);
    CHECK(a.high < 0.05);
    const auto b = wilson(100, 100);
    CHECK(b.high == 1.0);
    CHECK(b.low < 1.0);
    const auto c = wilson(50, 100);
    CHECK(c.low == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(c.high == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("t interval") {
    // mean 2, sample sd 1, n = 4: t_{0.975, 3} = 3.182446
    const double sum = 8.0, ss = 16.0 + 3.0;
    const auto ci = t_interval(sum, ss, 4);
    CHECK(ci.low == doctest::Approx(2 - 3.182446 * 0.5).epsilon(1e-6));
    CHECK(ci.high == doctest::Approx(2 + 3.182446 * 0.5).epsilon(1e-6));
}

TEST_CASE("degenerate kernel survives") {
    const auto r = estimate_survival(make(point_mass_kernel(Site{1, 0}), 50, 1), 200);
    CHECK(r.point_estimate == 1.0);
    CHECK(r.ci_high == 1.0);
    CHECK(r.ci_low < 1.0);
    CHECK(r.ci_low <= r.point_estimate);
}

TEST_CASE("survival of the uniform walk at H = 2") {
    const std::uint64_t N = 200000;
    const auto r = estimate_survival(make(uniform_kernel(2), 2, 3), N);
    const double p = 3.0 / 16;
    CHECK(std::abs(r.point_estimate - p) < 4 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("survival curve is nonincreasing on shared trajectories") {
    const auto r = estimate_survival(make(tilted_nn_kernel(2, Direction::axis(2), kSched), 5000, 7, kSched), 300);
    REQUIRE(r.checkpoints.size() >= 4);
    for (std::size_t i = 1; i < r.checkpoints.size(); ++i) {
        CHECK(r.checkpoints[i].estimate <= r.checkpoints[i - 1].estimate);
    }
    CHECK(r.checkpoints.back().estimate == r.point_estimate);
    CHECK_THROWS_AS(estimate_survival(make(uniform_kernel(2), 10, 1), 99), Error);
}

TEST_CASE("range tail") {
    const auto det = estimate_range_tail(make(point_mass_kernel(Site{1, 0}), 100, 1), 100, 0.05, 100);
    CHECK(det.point_estimate == 0.0);
    const auto one = estimate_range_tail(make(uniform_kernel(2), 1, 1), 1, 0.05, 500);
    CHECK(one.point_estimate == 0.0);
    const auto uni = estimate_range_tail(make(uniform_kernel(2), 1, 2), 2000, 0.05, 500);
    CHECK(uni.point_estimate <= 0.01);
    REQUIRE(uni.bound_value.has_value());
}

TEST_CASE("position tail") {
    const DriftSchedule s1(1.0, 0.0, 1);
    const auto det = estimate_position_tail(make(point_mass_kernel(Site{1, 0}), 100, 1, s1), 100, 0.1, 100);
    CHECK(det.point_estimate == 0.0);
    CHECK(det.extra["threshold"].get<double>() == doctest::Approx(std::pow(100.0, 0.6) / 3));
    CHECK(det.extra["hypothesis_holds"].get<bool>());

    auto custom = make(uniform_kernel(2), 10, 1, s1);
    custom.excitation = ExcitationSet::custom([](const Site&) { return true; }, "all");
    try {
        estimate_position_tail(custom, 10, 0.1, 100);
        FAIL("expected HypothesisUnverifiable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::hypothesis_unverifiable);
    }
    CHECK_FALSE(position_hypothesis(ExcitationSet::positive_half_space(Direction::axis(2)), Direction::axis(2), 0.5,
                                    100, 0.1)
                    .value());
    std::vector<Site> holes;
    for (int x = 0; x < 40; ++x) holes.push_back(Site{x, 0});
    // n^(0.6) / 3 = 5.3 at n = 100: forty holes inside the strip are too many
    CHECK_FALSE(position_hypothesis(ExcitationSet::complement(holes), Direction::axis(2), 0.5, 100, 0.1).value());
    CHECK(position_hypothesis(ExcitationSet::complement({Site{1, 0}}), Direction::axis(2), 0.5, 100, 0.1).value());
}

TEST_CASE("position tail decreases with n for the excited walk") {
    const auto c = make(tilted_nn_kernel(2, Direction::axis(2), kSched), 10, 5, kSched);
    double prev = 1.0;
    double prev_low = 1.0;
    for (std::uint64_t n : {1000u, 10000u}) {
        const auto r = estimate_position_tail(c, n, 0.15, 400);
        CHECK(r.point_estimate <= prev);
        CHECK(r.ci_low <= prev_low);
        prev = r.point_estimate;
        prev_low = r.ci_low;
    }
}

TEST_CASE("excursions") {
    const auto det = excursion_experiment(make(point_mass_kernel(Site{1, 0}), 50, 1), 5, 20);
    CHECK(det.exits == 20);
    CHECK(det.reentries == 0);

    const auto empty = excursion_experiment(make(uniform_kernel(2), 50, 1), 1, 0);
    CHECK(empty.trajectories == 0);
    CHECK(empty.m_hat == 3);
    CHECK(empty.comparison == doctest::Approx(1.0 / 64));

    const auto uni = excursion_experiment(make(uniform_kernel(2), 2000, 3), 1, 100);
    CHECK(uni.reentries > 0);
    const double p = uni.comparison;
    const double n = double(uni.hits + uni.misses);
    CHECK(uni.gamma_frequency >= p - 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("drift growth") {
    const auto det = drift_growth_curve(make(point_mass_kernel(Site{1, 0}), 10, 1), {10, 100, 1000}, 20);
    for (const auto& p : det.points) CHECK(p.estimate == double(p.n));
    REQUIRE(det.slope.has_value());
    CHECK(*det.slope == doctest::Approx(1.0).epsilon(1e-9));

    const std::uint64_t N = 400;
    const auto uni = drift_growth_curve(make(uniform_kernel(2), 10, 2), {10, 100, 1000}, N);
    for (const auto& p : uni.points) CHECK(std::abs(p.estimate) < 4 * 2 * std::sqrt(double(p.n) / N));
    CHECK_THROWS_AS(drift_growth_curve(make(uniform_kernel(2), 10, 2), {100, 10}, N), Error);
}

TEST_CASE("min tail and its bound") {
    const auto r = estimate_min_tail(make(uniform_kernel(2), 10, 4), 1000, 10, 500);
    CHECK(r.vacuous);
    CHECK(r.bound_value.value() == 1.0);
    const auto far = estimate_min_tail(make(uniform_kernel(2), 10, 4), 1000, 300, 500);
    CHECK_FALSE(far.vacuous);
    CHECK(far.point_estimate == 0.0);
}

TEST_CASE("results are independent of the worker count") {
    const auto c = make(tilted_nn_kernel(2, Direction::axis(2), kSched), 1000, 21, kSched);
    const auto one = estimate_survival(c, 300, 1).to_json().dump();
    CHECK(estimate_survival(c, 300, 2).to_json().dump() == one);
    CHECK(estimate_survival(c, 300, 8).to_json().dump() == one);
    const auto e1 = excursion_experiment(c, 2, 200, 1).to_json().dump();
    CHECK(excursion_experiment(c, 2, 200, 5).to_json().dump() == e1);
}
