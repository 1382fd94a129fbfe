#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "resolv/distribution.hpp"
#include "test_util.hpp"

using resolv::Channel;
using resolv::FiniteDistribution;
using resolv::output_distribution;
using resolv::variational_distance;

TEST_CASE("finite distribution validation") {
    CHECK_THROWS_AS(FiniteDistribution({"a", "b"}, {0.5}),
                    resolv::ValidationError);
    CHECK_THROWS_AS(FiniteDistribution({"a", "b"}, {-0.1, 1.1}),
                    resolv::ValidationError);
    CHECK_THROWS_AS(FiniteDistribution({"a", "b"}, {0.4, 0.5}),
                    resolv::ValidationError);
    CHECK_THROWS_AS(FiniteDistribution({"a", "a"}, {0.5, 0.5}),
                    resolv::ValidationError);
    CHECK_NOTHROW(FiniteDistribution({"a", "b"}, {0.5, 0.5 + 5e-13}));
}

TEST_CASE("channel validation") {
    CHECK_THROWS_AS(Channel({"0"}, {"0", "1"}, {0.5, 0.4}),
                    resolv::ValidationError);
    CHECK_THROWS_AS(Channel({"0"}, {"0", "1"}, {1.5, -0.5}),
                    resolv::ValidationError);
    CHECK_NOTHROW(Channel({"0"}, {"0", "1"}, {0.25, 0.75}));
}

TEST_CASE("variational distance basics") {
    const FiniteDistribution uniform({"0", "1"}, {0.5, 0.5});
    const FiniteDistribution point({"0", "1"}, {1.0, 0.0});

    CHECK(variational_distance(uniform, uniform) == 0.0);
    CHECK(variational_distance(uniform, point) == 0.5);
    CHECK(variational_distance(point, uniform) == 0.5);

    // disjoint supports move all mass
    const FiniteDistribution left({"a", "b", "c", "d"}, {0.5, 0.5, 0.0, 0.0});
    const FiniteDistribution right({"a", "b", "c", "d"}, {0.0, 0.0, 0.25, 0.75});
    CHECK(variational_distance(left, right) == 1.0);

    // same labels in a different order are aligned by label
    const FiniteDistribution flipped({"1", "0"}, {0.5, 0.5});
    CHECK(variational_distance(uniform, flipped) == 0.0);

    const FiniteDistribution other({"x", "y"}, {0.5, 0.5});
    CHECK_THROWS_AS(variational_distance(uniform, other), resolv::DomainError);
}

TEST_CASE("variational distance properties on random triples") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = testutil::random_distribution(gen, 5);
        const auto q = testutil::random_distribution(gen, 5);
        const auto r = testutil::random_distribution(gen, 5);
        const double dpq = variational_distance(p, q);
        const double dqr = variational_distance(q, r);
        const double dpr = variational_distance(p, r);
        CHECK(dpq >= 0.0);
        CHECK(dpq <= 1.0);
        CHECK(dpq == variational_distance(q, p));
        CHECK(dpr <= dpq + dqr + 1e-12);
    }
}

TEST_CASE("output distribution") {
    const FiniteDistribution uniform({"0", "1"}, {0.5, 0.5});

    SECTION("uniform input through a symmetric channel stays uniform") {
        const auto y = output_distribution(uniform,
                                           Channel::binary_symmetric(0.13));
        CHECK(y.prob(0) == Catch::Approx(0.5).margin(1e-15));
        CHECK(y.prob(1) == Catch::Approx(0.5).margin(1e-15));
    }
    SECTION("identity channel returns the input") {
        const FiniteDistribution p({"0", "1"}, {0.3, 0.7});
        const auto y = output_distribution(p, Channel::identity({"0", "1"}));
        CHECK(y.prob(0) == 0.3);
        CHECK(y.prob(1) == 0.7);
    }
    SECTION("constant rows return the row") {
        const FiniteDistribution r({"u", "v", "w"}, {0.2, 0.3, 0.5});
        const auto w = Channel::constant_rows({"0", "1"}, r);
        const FiniteDistribution p({"0", "1"}, {0.9, 0.1});
        const auto y = output_distribution(p, w);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(y.prob(j) == Catch::Approx(r.prob(j)).margin(1e-15));
        }
    }
    SECTION("alphabet mismatch") {
        const FiniteDistribution p({"x", "y"}, {0.3, 0.7});
        CHECK_THROWS_AS(output_distribution(p, Channel::identity({"0", "1"})),
                        resolv::DomainError);
    }
}
