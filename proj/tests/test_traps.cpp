#include "doctest.h"

#include <cmath>
#include <unordered_set>

#include "gerw/engine.hpp"

using namespace gerw;

TEST_CASE("empty trajectory") {
    const std::vector<Site> path{Site{0, 0}};
    const auto d = trap_scan(path, Direction::axis(2), 0.1, 0.5, 0.01);
    CHECK(d.traps.empty());
    CHECK(d.sigma == std::vector<std::uint64_t>{0});
}

TEST_CASE("deterministic +e1 path, n = 100") {
    std::vector<Site> path;
    for (int k = 0; k <= 100; ++k) path.push_back(Site{k, 0});
    const double b = 0.5, eps = 0.01;
    const auto d = trap_scan(path, Direction::axis(2), 0.1, b, eps);
    const double w = std::pow(100.0, 0.1);
    CHECK(d.width == doctest::Approx(4 * w));
    CHECK(d.width == doctest::Approx(6.3396).epsilon(1e-4));
    CHECK(d.e_t == doctest::Approx(2 * 0.1 * (1 - b / 2) - 2 * eps));
    for (const auto& [j, c] : d.strip_counts) {
        // integers in [2(j-1)w, 2(j+1)w] intersected with [0, 100]
        std::uint64_t expect = 0;
        for (int x = 0; x <= 100; ++x) {
            if (2 * (j - 1) * w <= x && x <= 2 * (j + 1) * w) ++expect;
        }
        CHECK(c == expect);
        CHECK(c <= 8);
        CHECK((d.traps.count(j) == 1) == (double(c) >= std::pow(100.0, d.e_t)));
    }
}

TEST_CASE("strips cover the range and sigma gaps hold") {
    WalkConfig c;
    c.kernel = uniform_kernel(2);
    c.horizon = 2000;
    c.seed = 77;
    TrajectoryRunner runner(c);
    for (std::uint64_t t = 0; t < 10; ++t) {
        PathRecorder rec;
        runner.run(t, &rec);
        const double e_w = 0.12, eps = 0.02;
        const auto d = trap_scan(rec.path, c.direction, e_w, 0.4, eps);
        std::unordered_set<Site, SiteHash> range(rec.path.begin(), rec.path.end());
        std::uint64_t covered = 0;
        for (const auto& [j, n] : d.strip_counts) covered += n;
        CHECK(covered >= range.size());
        const auto gap = std::max<std::uint64_t>(1, std::uint64_t(std::floor(std::pow(2000.0, 2 * e_w - eps))));
        for (std::size_t k = 1; k < d.sigma.size(); ++k) REQUIRE(d.sigma[k] >= d.sigma[k - 1] + gap);
    }
}

TEST_CASE("parameter checks") {
    const std::vector<Site> path{Site{0, 0}, Site{1, 0}};
    CHECK_THROWS_AS(trap_scan(path, Direction::axis(2), 0.2, 0.5, 0.01), Error);
    CHECK_THROWS_AS(trap_scan(path, Direction::axis(2), 0.1, 1.5, 0.01), Error);
    CHECK_THROWS_AS(trap_scan(path, Direction::axis(2), 0.1, 0.5, 0.2), Error);
}
