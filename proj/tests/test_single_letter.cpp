#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "resolv/single_letter.hpp"
#include "test_util.hpp"

using resolv::Channel;
using resolv::FiniteDistribution;
using resolv::ProductComponent;
using resolv::alternating_resolvability;
using resolv::conditional_divergence;
using resolv::feasible_polytope_vertices;
using resolv::grid_oracle_min_mutual_information;
using resolv::min_mutual_information;
using resolv::mutual_information;
using resolv::output_distribution;

namespace {

const FiniteDistribution kUniform2({"0", "1"}, {0.5, 0.5});

}  // namespace

TEST_CASE("mutual information") {
    SECTION("identity channel carries the full entropy") {
        CHECK(mutual_information(kUniform2, Channel::identity({"0", "1"})) ==
              Catch::Approx(std::log(2.0)).margin(1e-15));
    }
    SECTION("constant rows carry nothing") {
        const FiniteDistribution r({"0", "1"}, {0.3, 0.7});
        const auto w = Channel::constant_rows({"0", "1"}, r);
        CHECK(mutual_information(kUniform2, w) == 0.0);
    }
    SECTION("point-mass inputs carry nothing") {
        const FiniteDistribution point({"0", "1"}, {1.0, 0.0});
        CHECK(mutual_information(point, Channel::binary_symmetric(0.2)) ==
              Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("alphabet mismatch") {
        const FiniteDistribution p({"x", "y"}, {0.5, 0.5});
        CHECK_THROWS_AS(mutual_information(p, Channel::identity({"0", "1"})),
                        resolv::DomainError);
    }
}

TEST_CASE("conditional divergence") {
    const auto w = Channel::binary_symmetric(0.2);
    SECTION("collapses to mutual information at the true output") {
        std::mt19937_64 gen(29);
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = testutil::random_distribution(gen, 3);
            const auto wc = testutil::random_channel(gen, 3, 3);
            const auto ref = output_distribution(p, wc);
            CHECK(conditional_divergence(wc, ref, p) ==
                  Catch::Approx(mutual_information(p, wc)).margin(1e-12));
        }
    }
    SECTION("zero when every row equals the reference") {
        const FiniteDistribution r({"0", "1"}, {0.6, 0.4});
        const auto wc = Channel::constant_rows({"0", "1"}, r);
        CHECK(conditional_divergence(wc, r, kUniform2) ==
              Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("identity channel against the uniform reference") {
        CHECK(conditional_divergence(Channel::identity({"0", "1"}), kUniform2,
                                     kUniform2) ==
              Catch::Approx(std::log(2.0)).margin(1e-15));
    }
    SECTION("reference zero under positive mass yields infinity") {
        const FiniteDistribution ref({"0", "1"}, {1.0, 0.0});
        CHECK(conditional_divergence(w, ref, kUniform2) ==
              std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("polytope vertices by support enumeration") {
    SECTION("invertible constraints pin a single vertex") {
        const auto set = feasible_polytope_vertices(
            Channel::identity({"0", "1"}),
            FiniteDistribution({"0", "1"}, {0.3, 0.7}));
        REQUIRE(set.vertices.size() == 1);
        CHECK(set.constraint_rank == 2);
        CHECK(set.vertices[0].q.prob(0) == Catch::Approx(0.3).margin(1e-12));
        CHECK(set.vertices[0].q.prob(1) == Catch::Approx(0.7).margin(1e-12));
    }
    SECTION("three inputs over two outputs") {
        // rows (1,0), (0,1), (0.5,0.5); hand enumeration of supports gives
        // exactly the vertices (0.5, 0.5, 0) and (0, 0, 1)
        const Channel w({"a", "b", "c"}, {"0", "1"},
                        {1.0, 0.0, 0.0, 1.0, 0.5, 0.5});
        const auto set = feasible_polytope_vertices(w, kUniform2);
        REQUIRE(set.vertices.size() == 2);
        bool saw_pair = false, saw_point = false;
        for (const auto& v : set.vertices) {
            if (v.support == std::vector<std::size_t>{0, 1}) {
                saw_pair = true;
                CHECK(v.q.prob(0) == Catch::Approx(0.5).margin(1e-12));
                CHECK(v.q.prob(1) == Catch::Approx(0.5).margin(1e-12));
            }
            if (v.support == std::vector<std::size_t>{2}) {
                saw_point = true;
                CHECK(v.q.prob(2) == Catch::Approx(1.0).margin(1e-12));
            }
        }
        CHECK(saw_pair);
        CHECK(saw_point);
    }
    SECTION("asymmetric binary channel with a uniform target") {
        const auto set = feasible_polytope_vertices(
            Channel::binary_symmetric(0.2), kUniform2);
        REQUIRE(set.vertices.size() == 1);
        CHECK(set.vertices[0].q.prob(0) == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("feasibility of every vertex") {
        std::mt19937_64 gen(41);
        for (int trial = 0; trial < 10; ++trial) {
            const auto w = testutil::random_channel(gen, 3, 3, 0.05);
            const auto q0 = testutil::random_distribution(gen, 3);
            const auto target = output_distribution(q0, w);
            const auto set = feasible_polytope_vertices(w, target);
            for (const auto& v : set.vertices) {
                CHECK(v.feasibility <= 1e-9);
            }
        }
    }
    SECTION("unreachable targets are infeasible") {
        const FiniteDistribution row({"0", "1"}, {1.0, 0.0});
        const auto w = Channel::constant_rows({"0", "1"}, row);
        CHECK_THROWS_AS(
            feasible_polytope_vertices(
                w, FiniteDistribution({"0", "1"}, {0.0, 1.0})),
            resolv::InfeasibilityError);
    }
}

TEST_CASE("minimum mutual information over the matching polytope") {
    SECTION("a slack input shuts the channel off") {
        const Channel w({"a", "b", "c"}, {"0", "1"},
                        {1.0, 0.0, 0.0, 1.0, 0.5, 0.5});
        const auto best = min_mutual_information(w, kUniform2);
        CHECK(best.value == Catch::Approx(0.0).margin(1e-12));
        CHECK(best.support == std::vector<std::size_t>{2});
    }
    SECTION("binary symmetric channel matches the closed form") {
        const auto best =
            min_mutual_information(Channel::binary_symmetric(0.11), kUniform2);
        const double closed = std::log(2.0) - testutil::binary_entropy(0.11);
        CHECK(best.value == Catch::Approx(closed).margin(1e-9));
    }
    SECTION("identity channel returns the target entropy") {
        const FiniteDistribution target({"0", "1"}, {0.3, 0.7});
        const auto best =
            min_mutual_information(Channel::identity({"0", "1"}), target);
        CHECK(best.value ==
              Catch::Approx(testutil::binary_entropy(0.3)).margin(1e-12));
        // 0.8813 bits
        CHECK(best.value / std::log(2.0) ==
              Catch::Approx(0.8812908992306927).margin(1e-9));
    }
    SECTION("vertex minimum never exceeds sampled feasible points") {
        std::mt19937_64 gen(53);
        for (int trial = 0; trial < 5; ++trial) {
            // rank-deficient channel: third row mixes the first two
            const auto base = testutil::random_channel(gen, 2, 2, 0.05);
            const double mix = resolv::detail::uniform_unit(gen);
            std::vector<double> m;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) m.push_back(base.prob(i, j));
            for (std::size_t j = 0; j < 2; ++j) {
                m.push_back(mix * base.prob(0, j) +
                            (1.0 - mix) * base.prob(1, j));
            }
            const Channel w({"a", "b", "c"}, {"0", "1"}, m,
                            resolv::kProductSumTol);
            const FiniteDistribution q0(
                {"a", "b", "c"}, testutil::random_simplex(gen, 3),
                resolv::kProductSumTol);
            const auto target = output_distribution(q0, w);
            const auto set = feasible_polytope_vertices(w, target);
            const auto best = min_mutual_information(w, target);
            for (int s = 0; s < 200; ++s) {
                // random convex combination of vertices stays feasible
                const auto weights =
                    testutil::random_simplex(gen, set.vertices.size());
                std::vector<double> q(3, 0.0);
                for (std::size_t v = 0; v < set.vertices.size(); ++v) {
                    for (std::size_t i = 0; i < 3; ++i) {
                        q[i] += weights[v] * set.vertices[v].q.prob(i);
                    }
                }
                const FiniteDistribution qd({"a", "b", "c"}, q, 1e-8);
                CHECK(best.value <= mutual_information(qd, w) + 1e-9);
            }
        }
    }
}

TEST_CASE("grid oracle cross-checks the vertex method") {
    SECTION("binary symmetric channel") {
        const auto w = Channel::binary_symmetric(0.11);
        const auto oracle =
            grid_oracle_min_mutual_information(w, kUniform2, 1e-4, 1e-3);
        REQUIRE(oracle.has_value());
        const auto best = min_mutual_information(w, kUniform2);
        CHECK(std::abs(oracle->value - best.value) <= 1e-3);
    }
    SECTION("no feasible grid point is inconclusive, not an error") {
        // uniform target is unreachable: rows concentrate near "0"
        const Channel w({"a", "b"}, {"0", "1"}, {0.9, 0.1, 0.8, 0.2});
        const auto oracle =
            grid_oracle_min_mutual_information(w, kUniform2, 0.25, 1e-6);
        CHECK_FALSE(oracle.has_value());
    }
    SECTION("alphabets beyond four inputs are rejected") {
        std::mt19937_64 gen(3);
        const auto w = testutil::random_channel(gen, 5, 2);
        const auto target =
            output_distribution(testutil::random_distribution(gen, 5), w);
        CHECK_THROWS_AS(
            grid_oracle_min_mutual_information(w, target, 0.1, 0.1),
            resolv::DomainError);
    }
}

TEST_CASE("alternating pair summary") {
    const ProductComponent ident(kUniform2, Channel::identity({"0", "1"}));
    const ProductComponent noise(
        kUniform2, Channel::constant_rows(
                       {"0", "1"}, FiniteDistribution({"0", "1"}, {0.8, 0.2})));

    SECTION("identity paired with a constant-row channel") {
        const auto r = alternating_resolvability(ident, noise);
        CHECK(r.component_value[0] == std::log(2.0));
        CHECK(r.component_value[1] == 0.0);
        CHECK(r.s == std::log(2.0));
        CHECK(r.s_star == 0.0);
    }
    SECTION("identical components collapse the pair") {
        const auto r = alternating_resolvability(ident, ident);
        CHECK(r.s == r.s_star);
    }
    SECTION("swapping components leaves the summary unchanged") {
        const auto a = alternating_resolvability(ident, noise);
        const auto b = alternating_resolvability(noise, ident);
        CHECK(a.s == b.s);
        CHECK(a.s_star == b.s_star);
    }
}
