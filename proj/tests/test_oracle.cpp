#include "doctest.h"

#include <sstream>

#include "gerw/oracle.hpp"

using namespace gerw;

namespace {

WalkConfig with_kernel(KernelPtr k) {
    WalkConfig c;
    c.kernel = std::move(k);
    return c;
}

// independent brute force over the 4^H equally likely uniform paths
Rational brute_survival(int H) {
    std::uint64_t good = 0, total = 0;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    std::uint64_t paths = 1;
    for (int i = 0; i < H; ++i) paths *= 4;
    for (std::uint64_t code = 0; code < paths; ++code) {
        long x = 0, y = 0;
        bool ok = true;
        auto c = code;
        for (int i = 0; i < H; ++i) {
            x += dx[c % 4];
            y += dy[c % 4];
            c /= 4;
            ok = ok && x > 0;
        }
        good += ok;
        ++total;
    }
    return Rational(good, total);
}

} // namespace

TEST_CASE("uniform walk, two steps") {
    const auto c = with_kernel(uniform_kernel(2));
    const auto d = enumerate(c, 2, Observable::survived);
    CHECK(d.outcomes.at(1.0) == Rational(3, 16));
    CHECK(d.total() == 1);
    CHECK(d.paths == 16);
    for (int H = 1; H <= 6; ++H) CHECK(enumerate(c, H, Observable::survived).outcomes[1.0] == brute_survival(H));
}

TEST_CASE("uniform walk, one step") {
    const auto d = enumerate(with_kernel(uniform_kernel(2)), 1, Observable::final_proj);
    CHECK(d.outcomes.size() == 3);
    CHECK(d.outcomes.at(-1.0) == Rational(1, 4));
    CHECK(d.outcomes.at(0.0) == Rational(1, 2));
    CHECK(d.outcomes.at(1.0) == Rational(1, 4));
}

TEST_CASE("horizon zero is a point mass") {
    for (auto obs : {Observable::final_proj, Observable::survived, Observable::range_size, Observable::min_proj}) {
        const auto d = enumerate(with_kernel(uniform_kernel(2)), 0, obs);
        CHECK(d.outcomes.size() == 1);
        CHECK(d.total() == 1);
    }
    CHECK(enumerate(with_kernel(uniform_kernel(2)), 0, Observable::range_size).outcomes.at(1.0) == 1);
}

TEST_CASE("exact means") {
    const auto u = with_kernel(uniform_kernel(2));
    for (int H = 0; H <= 8; ++H) CHECK(exact_mean_proj(u, H) == 0);

    const auto cookie = with_kernel(cookie_kernel(2, Direction::axis(2), Rational(3, 4)));
    CHECK(exact_mean_proj(cookie, 1) == Rational(2, 3));

    auto tilted = with_kernel(tilted_nn_kernel(2, Direction::axis(2), DriftSchedule(0.5, 0.0, 1), 1000));
    CHECK(exact_mean_proj(tilted, 1) == Rational(708, 1000));

    // submartingale: exact mean is nondecreasing in H
    auto sub = with_kernel(tilted_nn_kernel(2, Direction::axis(2), DriftSchedule(0.5, 0.1, 1), 64));
    Rational prev(0);
    for (int H = 1; H <= 7; ++H) {
        const auto m = exact_mean_proj(sub, H);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("range and minimum observables") {
    const auto c = with_kernel(uniform_kernel(2));
    const auto r = enumerate(c, 2, Observable::range_size);
    CHECK(r.outcomes.at(2.0) == Rational(1, 4)); // immediate backtrack
    CHECK(r.outcomes.at(3.0) == Rational(3, 4));
    const auto m = enumerate(c, 2, Observable::min_proj);
    CHECK(m.outcomes.at(-2.0) == Rational(1, 16));
    CHECK(m.total() == 1);
}

TEST_CASE("caps and exactness") {
    try {
        enumerate(with_kernel(uniform_kernel(2)), 14, Observable::final_proj);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::too_large);
    }
    const auto floaty = with_kernel(tilted_nn_kernel(2, Direction::axis(2), DriftSchedule(0.5, 0.1, 1)));
    try {
        enumerate(floaty, 2, Observable::final_proj);
        FAIL("expected NotRational");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_rational);
    }
}

TEST_CASE("distribution csv") {
    std::stringstream out;
    write_distribution_csv(out, enumerate(with_kernel(uniform_kernel(2)), 1, Observable::final_proj));
    CHECK(out.str() == "value,numerator,denominator\n-1.0,1,4\n0.0,1,2\n1.0,1,4\n");
}
