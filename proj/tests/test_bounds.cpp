#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "resolv/bounds.hpp"
#include "resolv/codes.hpp"
#include "test_util.hpp"

using resolv::BoundKind;
using resolv::Channel;
using resolv::FiniteDistribution;
using resolv::ProductMode;
using resolv::Spectrum;
using resolv::SpectrumScale;
using resolv::achievability_bound;
using resolv::converse_bound;
using resolv::default_c_grid;
using resolv::optimize_bound_over_c;

namespace {

Spectrum point_mass(double v, int n = 1) {
    return Spectrum({{v, 1.0}}, n, SpectrumScale::kPerSymbol);
}

}  // namespace

TEST_CASE("achievability bound arithmetic") {
    const auto s = point_mass(std::log(2.0));
    SECTION("threshold at the atom leaves only the penalty term") {
        const double b = achievability_bound(s, 4, std::log(2.0), 1);
        CHECK(b == Catch::Approx(0.5 * std::sqrt(2.0 / 4.0)).margin(1e-15));
        CHECK(b == Catch::Approx(0.35355339059327373).margin(1e-12));
    }
    SECTION("large codebooks drive the bound to zero") {
        double prev = 1.0;
        for (std::uint64_t m : {1ull, 16ull, 256ull, 1ull << 20}) {
            const double b = achievability_bound(s, m, std::log(2.0), 1);
            CHECK(b <= prev + 1e-15);
            prev = b;
        }
        CHECK(prev < 1e-2);
    }
    SECTION("threshold below the spectrum clamps at one") {
        CHECK(achievability_bound(s, 2, 0.0, 1) == 1.0);
    }
    SECTION("negative threshold is rejected") {
        CHECK_THROWS_AS(achievability_bound(s, 2, -0.1, 1),
                        resolv::DomainError);
    }
}

TEST_CASE("converse bound arithmetic") {
    SECTION("reference point mass at log 2 with a single codeword") {
        const auto s = point_mass(std::log(2.0));
        const auto b = converse_bound(s, 1, std::log(2.0), 1);
        CHECK(b.raw == Catch::Approx(0.5).margin(1e-12));
        CHECK(b.value == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("huge threshold is vacuous but valid") {
        const auto s = point_mass(0.3);
        const auto b = converse_bound(s, 2, 40.0, 1);
        CHECK(b.raw == Catch::Approx(0.0).margin(1e-15));
        CHECK(b.value == 0.0);
    }
    SECTION("negative raw values report as zero with the raw kept") {
        const auto s = point_mass(0.1);
        const auto b = converse_bound(s, 1, 0.2, 1);
        CHECK(b.raw < 0.0);
        CHECK(b.value == 0.0);
    }
    SECTION("side condition M <= e^{nc}") {
        const auto s = point_mass(1.0);
        CHECK_THROWS_AS(converse_bound(s, 3, 0.5, 1), resolv::DomainError);
        CHECK_NOTHROW(converse_bound(s, 1, 0.0, 1));
    }
    SECTION("raw value falls with M at a fixed threshold") {
        // the subtracted term M e^{-nc} grows linearly in M
        const Spectrum s({{0.0, 0.4}, {1.0, 0.6}}, 1,
                         SpectrumScale::kPerSymbol);
        double prev = 1.0;
        for (std::uint64_t m : {1ull, 2ull}) {
            const auto b = converse_bound(s, m, std::log(2.0), 1);
            CHECK(b.raw <= prev);
            prev = b.raw;
        }
    }
}

TEST_CASE("threshold optimization") {
    SECTION("achievability optimum sits at a point-mass atom") {
        const auto s = point_mass(1.3);
        const auto best = optimize_bound_over_c(
            s, 64, 1, BoundKind::kAchievability, default_c_grid(s));
        // oracle: evaluate the same candidate set directly
        double expect = 2.0;
        for (double c : default_c_grid(s)) {
            if (c < 0.0) continue;
            expect = std::min(expect, achievability_bound(s, 64, c, 1));
        }
        for (double c : {1.3 - 1e-12, 1.3, 1.3 + 1e-12}) {
            expect = std::min(expect, achievability_bound(s, 64, c, 1));
        }
        CHECK(best.c_star == 1.3);
        CHECK(best.value == Catch::Approx(expect).margin(1e-15));
    }
    SECTION("single candidate grids return that candidate") {
        const auto s = point_mass(0.4);
        const auto best = optimize_bound_over_c(
            s, 1, 1, BoundKind::kConverse, {10.0});
        CHECK(best.c_star <= 10.0);
    }
    SECTION("converse optimum for the tightness example") {
        const auto s = point_mass(std::log(2.0));
        const auto best = optimize_bound_over_c(
            s, 1, 1, BoundKind::kConverse, default_c_grid(s));
        CHECK(best.c_star == Catch::Approx(std::log(2.0)).margin(1e-15));
        CHECK(best.value == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("empty effective grid") {
        // all candidates (user grid and injected atoms) sit below c = 0
        const auto s = point_mass(-1.0);
        CHECK_THROWS_AS(optimize_bound_over_c(s, 4, 1,
                                              BoundKind::kAchievability,
                                              {-2.0}),
                        resolv::DomainError);
    }
    SECTION("converse grids always reach the feasibility boundary") {
        const auto s = point_mass(0.4);
        const auto best = optimize_bound_over_c(s, 100, 1,
                                                BoundKind::kConverse,
                                                {0.0, 0.1});
        CHECK(best.c_star >= std::log(100.0) - 1e-12);
        CHECK(best.value == 0.0);  // vacuous but valid
    }
    SECTION("optimized value never exceeds single evaluations") {
        const Spectrum s({{0.1, 0.3}, {0.9, 0.7}}, 1,
                         SpectrumScale::kPerSymbol);
        const auto best = optimize_bound_over_c(
            s, 8, 1, BoundKind::kAchievability, default_c_grid(s));
        for (double c : {0.0, 0.1, 0.5, 0.9, 1.5}) {
            CHECK(best.value <= achievability_bound(s, 8, c, 1) + 1e-15);
        }
    }
}

TEST_CASE("bound sweep is monotone in the codebook size") {
    const FiniteDistribution uniform({"0", "1"}, {0.5, 0.5});
    const auto w = Channel::binary_symmetric(0.1);
    const auto ref = resolv::output_distribution(uniform, w);
    const auto letter =
        resolv::info_density_spectrum(uniform, w, ref, 1, false);
    for (int n : {4, 8}) {
        const auto s = resolv::spectrum_memoryless_exact(
            {letter}, n, ProductMode::kIid, true);
        const auto curve = resolv::bound_sweep(s, {1, 2, 4, 8}, n,
                                               default_c_grid(s));
        REQUIRE(curve.points.size() == 4);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].value <=
                  curve.points[i - 1].value + 1e-15);
        }
    }
    SECTION("sweep rejects a non-increasing M axis") {
        resolv::SweepCurve curve;
        curve.append({0.0, 2, 1, 0.0, 0.0});
        CHECK_THROWS_AS(curve.append({0.0, 2, 1, 0.0, 0.0}),
                        resolv::DomainError);
    }
}

TEST_CASE("converse bound respects an exhaustively evaluated code") {
    // identity channel, uniform binary target, single codeword: the bound
    // at c = log 2 equals the exact distance 0.5
    const auto wn = Channel::identity({"0", "1"});
    const FiniteDistribution target({"0", "1"}, {0.5, 0.5});
    const resolv::ResolvabilityCode code{1, {"0"}, std::nullopt};
    const double d = resolv::code_distance(code, wn, target);
    CHECK(d == 0.5);
    const auto s = resolv::code_info_spectrum(code, wn, target, 1);
    const auto b = converse_bound(s, 1, std::log(2.0), 1);
    CHECK(b.value == Catch::Approx(d).margin(1e-12));
    CHECK(b.value <= d + 1e-12);
}
