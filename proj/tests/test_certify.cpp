#include "doctest.h"

#include <cmath>

#include "gerw/certify.hpp"

using namespace gerw;

namespace {

class UnboundedKernel final : public IncrementKernel {
public:
    std::string name() const override { return "unbounded"; }
    int dimension() const override { return 2; }
    double jump_bound() const override { return INFINITY; }
    double ellipticity_mass() const override { return 0.25; }
    double ellipticity_displacement() const override { return 0.5; }
    bool finite_support() const override { return false; }
    std::size_t max_support_size() const override { return 0; }
    Support support(const StepContext&) const override { return {}; }
    nlohmann::json describe() const override { return {{"name", name()}}; }
};

} // namespace

TEST_CASE("shipped tilted kernel certifies") {
    const DriftSchedule sched(0.5, 0.1, 1);
    const auto l = Direction::axis(2);
    const auto k = tilted_nn_kernel(2, l, sched);
    const auto cert = certify(*k, sched, l, {1000, 1000, {}, {}});
    CHECK(cert.certified());
    CHECK(cert.K == 2.0);
    CHECK(cert.h == 0.25);
    CHECK(cert.r == 0.5);
    CHECK(cert.ue2_analytic);
    CHECK_FALSE(cert.counterexample.has_value());
    CHECK(cert.directions_checked >= 1000);
}

TEST_CASE("deterministic step fails the martingale condition") {
    const auto k = point_mass_kernel(Site{1, 0});
    const auto cert = certify(*k, DriftSchedule(0.5, 0.1, 1), Direction::axis(2), {50, 100, {}, {}});
    CHECK_FALSE(cert.martingale_ok);
    CHECK_FALSE(cert.certified());
    REQUIRE(cert.counterexample.has_value());
}

TEST_CASE("long step fails the bounded-jump condition") {
    const Support s = {exact_step(Site{3, 0}, Rational(1, 2)), exact_step(Site{-3, 0}, Rational(1, 2))};
    const auto k = table_kernel("long", 2, 2.0, 0.25, 0.5, s, s);
    const auto cert = certify(*k, std::nullopt, Direction::axis(2), {10, 100, {}, {}});
    CHECK_FALSE(cert.bounded_ok);
    CHECK_FALSE(cert.certified());
}

TEST_CASE("schedule beyond nearest-neighbour reach fails the drift check") {
    const DriftSchedule sched(1.2, 0.0, 1);
    const auto k = tilted_nn_kernel(2, Direction::axis(2), sched);
    const auto cert = certify(*k, sched, Direction::axis(2), {10, 100, {}, {}});
    CHECK_FALSE(cert.drift_ok);
    REQUIRE(cert.counterexample.has_value());
    CHECK(cert.counterexample->condition == "drift");
}

TEST_CASE("uniform kernel certifies without a schedule") {
    const auto cert = certify(*uniform_kernel(3), std::nullopt, Direction::axis(3), {10, 200, {}, {}});
    CHECK(cert.certified());
    CHECK(cert.h == doctest::Approx(1.0 / 6));
}

TEST_CASE("certification is monotone in (h, r)") {
    const DriftSchedule sched(0.5, 0.1, 1);
    const auto l = Direction::axis(2);
    const auto k = tilted_nn_kernel(2, l, sched);
    for (double h : {0.25, 0.2, 0.1, 0.01}) {
        for (double r : {0.5, 0.4, 0.1}) {
            CHECK(certify(*k, sched, l, {100, 200, h, r}).certified());
        }
    }
    // too much mass or too large a displacement is refused
    CHECK_FALSE(certify(*k, sched, l, {100, 200, 0.3, 0.5}).certified());
    CHECK_FALSE(certify(*k, sched, l, {100, 200, 0.25, 0.8}).ue2_ok);
}

TEST_CASE("r is clamped to one") {
    const auto cert = certify(*uniform_kernel(2), std::nullopt, Direction::axis(2), {5, 100, 0.1, 3.0});
    CHECK(cert.r == 1.0);
}

TEST_CASE("infinite support is refused") {
    UnboundedKernel k;
    CHECK_THROWS_AS(certify(k, std::nullopt, Direction::axis(2)), Error);
}

TEST_CASE("direction grid is on the sphere") {
    for (int d : {2, 3, 5}) {
        const auto grid = direction_grid(d, 500);
        CHECK(grid.size() == 500);
        for (const auto& v : grid) {
            double n = 0.0;
            for (int i = 0; i < d; ++i) n += v[i] * v[i];
            CHECK(std::abs(n - 1.0) < 1e-12);
        }
    }
}

// every unit vector has an axis with |e_i . l'| >= 1/sqrt(2), so the 1/4 mass on that
// axis step moves more than 0.5 in direction l'
TEST_CASE("UE2 on a fine grid for the tilted kernel") {
    const auto grid = direction_grid(2, 10000);
    for (const auto& lp : grid) {
        double mass = 0.0;
        for (const auto& w : uniform_kernel(2)->support({0, false, true})) {
            if (lp.dot(w.step) > 0.5) mass += w.probability;
        }
        REQUIRE(mass >= 0.25);
    }
}
