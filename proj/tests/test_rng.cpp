#include "doctest.h"

#include "gerw/rng.hpp"

using namespace gerw;

// Random123 known-answer vectors for philox4x32-10.
TEST_CASE("philox known answers") {
    auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});

    auto ones = Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
    CHECK(ones == Philox4x32::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});

    auto pi = Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
    CHECK(pi == Philox4x32::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms are deterministic and in range") {
    CounterRng a(42), b(42), c(43);
    CHECK(a.uniform(0, 0) == b.uniform(0, 0));
    CHECK(a.uniform(0, 0) != c.uniform(0, 0));
    CHECK(a.uniform(0, 1) != a.uniform(1, 0));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
        const double u = a.uniform(7, i);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
