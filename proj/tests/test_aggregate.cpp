#include "doctest.h"

#include "gerw/aggregate.hpp"
#include "gerw/montecarlo.hpp"

using namespace gerw;

namespace {

WalkConfig tilted(std::uint64_t horizon, std::uint64_t seed) {
    WalkConfig c;
    c.kernel = tilted_nn_kernel(2, Direction::axis(2), DriftSchedule(0.5, 0.1, 1));
    c.schedule = DriftSchedule(0.5, 0.1, 1);
    c.horizon = horizon;
    c.seed = seed;
    c.checkpoints = {10, 100};
    return c;
}

EnsembleAggregate shard(const WalkConfig& c, std::uint64_t begin, std::uint64_t end) {
    EnsembleAggregate a(c);
    TrajectoryRunner r(c);
    for (auto t = begin; t < end; ++t) a.add(r.run(t));
    return a;
}

} // namespace

TEST_CASE("exact sum is order independent") {
    ExactSum a, b;
    const std::vector<double> xs = {1e6, 0.1, -3.25, 1e-3, 7.0, -1e6, 0.3};
    for (double x : xs) a.add(x);
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) b.add(*it);
    CHECK(a == b);
    CHECK(a.value() == doctest::Approx(4.151).epsilon(1e-9));
    CHECK_THROWS_AS(a.add(INFINITY), Error);
}

TEST_CASE("merge identity, commutativity, sharding") {
    const auto c = tilted(300, 4);
    const auto whole = shard(c, 0, 1000);
    EnsembleAggregate merged;
    for (int i = 0; i < 4; ++i) merged = EnsembleAggregate::merge(merged, shard(c, 250 * i, 250 * (i + 1)));
    CHECK(merged == whole);
    CHECK(merged.to_json().dump() == whole.to_json().dump());

    const auto a = shard(c, 0, 300);
    const auto b = shard(c, 300, 700);
    CHECK(EnsembleAggregate::merge(a, b) == EnsembleAggregate::merge(b, a));
    CHECK(EnsembleAggregate::merge(a, EnsembleAggregate()) == a);
    CHECK(EnsembleAggregate::merge(EnsembleAggregate(), a) == a);
    CHECK(EnsembleAggregate::merge(a, EnsembleAggregate(c)) == a);
    CHECK(whole.trajectories() == 1000);
    CHECK(whole.at(100).count == 1000);
}

TEST_CASE("merging different configurations is refused") {
    const auto a = shard(tilted(100, 1), 0, 10);
    const auto b = shard(tilted(100, 2), 0, 10);
    try {
        EnsembleAggregate::merge(a, b);
        FAIL("expected a mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config_mismatch);
    }
}

TEST_CASE("run_ensemble does not depend on the worker count") {
    const auto c = tilted(500, 9);
    const auto one = mc::run_ensemble(c, 400, 1);
    for (unsigned w : {2u, 3u, 8u}) CHECK(mc::run_ensemble(c, 400, w) == one);
}
