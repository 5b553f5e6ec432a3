#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "interphase/assemblage.hpp"
#include "oracles.hpp"

using namespace interphase;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kTheta1 = 27.0 / 64.0;
}

TEST_CASE("layer radius and volume fractions are mutually consistent", "[assemblage]") {
    double r2 = radius_from_fraction(3.0, 4.0, 0.1);
    REQUIRE_THAT(r2 - 3.0, WithinRel(0.22044205188374595, 1e-14));
    REQUIRE_THAT(radius_from_fraction(3.0, 4.0, 0.01) - 3.0,
                 WithinRel(0.023518843222326122, 1e-14));

    AssemblageSpec spec(3.0, r2, 4.0, 1.0, 5.0, 10.0);
    VolumeFractions vf = volume_fractions(spec);
    REQUIRE_THAT(vf.theta1, WithinRel(kTheta1, 1e-15));
    REQUIRE_THAT(vf.theta2, WithinRel(0.1, 1e-12));
    REQUIRE_THAT(vf.theta1 + vf.theta2 + vf.theta3, WithinRel(1.0, 1e-15));

    REQUIRE_THROWS_AS(radius_from_fraction(3.0, 4.0, 0.7), std::invalid_argument);
    REQUIRE_THROWS_AS(AssemblageSpec(3.0, 2.9, 4.0, 1.0, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(AssemblageSpec(3.0, 3.2, 4.0, 1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("worked example values are reproduced", "[assemblage]") {
    const double h = radius_from_fraction(3.0, 4.0, 0.1) - 3.0;
    REQUIRE_THAT(exact_sigma_star(1, 5, 10, kTheta1, 0.1),
                 WithinRel(4.9333362683339494, 1e-13));
    REQUIRE_THAT(reference_sigma_star(1, 10, kTheta1),
                 WithinRel(5.4064272211720227, 1e-13));
    REQUIRE_THAT(approx_sigma_star(1, 5, 10, kTheta1, 3.0, h),
                 WithinRel(4.9481513855943624, 1e-13));
    REQUIRE_THAT(delta_sigma_first_order(1, 5, 10, kTheta1, 3.0, 1.0),
                 WithinRel(-2.0788948009762687, 1e-13));
}

TEST_CASE("exact value matches the dipole-propagation oracle", "[assemblage]") {
    for (double s1 : {0.1, 1.0, 5.0})
        for (double s2 : {0.01, 1.0, 20.0})
            for (double s3 : {0.5, 10.0})
                for (auto [r1, r2] : {std::pair{3.0, 3.2}, std::pair{2.0, 3.5}}) {
                    const double r3 = 4.0;
                    double t1 = std::pow(r1 / r3, 3);
                    double t2 = std::pow(r2 / r3, 3) - t1;
                    double got = exact_sigma_star(s1, s2, s3, t1, t2);
                    long double want = oracle::coated_sphere_sigma(
                        {{s1, r1}, {s2, r2}, {s3, r3}});
                    REQUIRE_THAT(got, WithinRel(static_cast<double>(want), 1e-13));
                }
}

TEST_CASE("reference value matches both alternative forms", "[assemblage]") {
    for (double s1 : {0.2, 1.0, 7.0})
        for (double s3 : {0.5, 3.0})
            for (double t1 : {0.1, 0.421875, 0.8}) {
                double got = reference_sigma_star(s1, s3, t1);
                REQUIRE_THAT(got,
                             WithinRel(static_cast<double>(
                                           oracle::alt_reference_form(s1, s3, t1)),
                                       1e-14));
                double r1 = 4.0 * std::cbrt(t1);
                long double two_shell =
                    oracle::coated_sphere_sigma({{s1, r1}, {s3, 4.0}});
                REQUIRE_THAT(got, WithinRel(static_cast<double>(two_shell), 1e-13));
            }
    REQUIRE(reference_sigma_star(2.0, 2.0, 0.3) == 2.0);
}

TEST_CASE("degenerate layers collapse to two-phase values", "[assemblage]") {
    // Layer identical to the core: only theta1 + theta2 matters.
    REQUIRE_THAT(exact_sigma_star(2.0, 2.0, 7.0, 0.3, 0.2),
                 WithinRel(reference_sigma_star(2.0, 7.0, 0.5), 1e-14));
    // Vanishing layer: the exact value flows to the reference.
    REQUIRE_THAT(exact_sigma_star(2.0, 5.0, 7.0, 0.3, 0.0),
                 WithinRel(reference_sigma_star(2.0, 7.0, 0.3), 1e-14));
    // Layer identical to the matrix, random materials.
    std::mt19937 rng(424242u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double s1 = std::exp(std::log(0.1) + u(rng) * std::log(100.0));
        double s3 = std::exp(std::log(0.1) + u(rng) * std::log(100.0));
        double t1 = 0.05 + 0.8 * u(rng);
        double t2 = 0.01 + (0.94 - t1) * u(rng);
        REQUIRE_THAT(exact_sigma_star(s1, s3, s3, t1, t2),
                     WithinRel(reference_sigma_star(s1, s3, t1), 1e-12));
    }
}

TEST_CASE("first-order correction is linear in the thickness", "[assemblage]") {
    double d1 = delta_sigma_first_order(1, 5, 10, kTheta1, 3.0, 0.01);
    double d2 = delta_sigma_first_order(1, 5, 10, kTheta1, 3.0, 0.02);
    REQUIRE_THAT(d2, WithinRel(2.0 * d1, 1e-14));
    REQUIRE(delta_sigma_first_order(1, 10, 10, kTheta1, 3.0, 0.01) == 0.0);
    REQUIRE_THROWS_AS(delta_sigma_first_order(1, 0.0, 10, kTheta1, 3.0, 0.01),
                      std::domain_error);
}

TEST_CASE("halving the layer thickness quarters the correction residual",
          "[assemblage]") {
    auto residual = [](double s2, double h) {
        double t2 = std::pow((3.0 + h) / 4.0, 3) - kTheta1;
        return exact_sigma_star(1, s2, 10, kTheta1, t2) -
               approx_sigma_star(1, s2, 10, kTheta1, 3.0, h);
    };
    const double pinned[] = {3.971604651, 3.982874035, 4.024125696, 4.102669377};
    const double s2s[] = {1.0, 2.0, 5.0, 8.0};
    for (int i = 0; i < 4; ++i) {
        double ratio = residual(s2s[i], 0.06) / residual(s2s[i], 0.03);
        REQUIRE_THAT(ratio, WithinRel(pinned[i], 1e-6));
    }
}

TEST_CASE("asymptotes for extreme layer conductivities", "[assemblage]") {
    const double t3 = 1.0 - kTheta1;
    REQUIRE_THAT(high_contrast_limit(1.0, 10.0, t3, 1.0),
                 WithinRel(6.3475461986900055, 1e-13));
    REQUIRE_THAT(low_contrast_limit(1.0, 10.0, t3, 10.0),
                 WithinRel(5.3611329775325529, 1e-13));
    // Zero product: the layer contributes nothing extra.
    REQUIRE_THAT(high_contrast_limit(1.0, 10.0, t3, 0.0),
                 WithinRel(reference_sigma_star(1.0, 10.0, kTheta1), 1e-12));
    // Infinite ratio reproduces the zero-product high-contrast form.
    REQUIRE_THAT(low_contrast_limit(1.0, 10.0, t3,
                                    std::numeric_limits<double>::infinity()),
                 WithinRel(high_contrast_limit(1.0, 10.0, t3, 0.0), 1e-12));
    // Degenerate geometry: no core or layer at all.
    REQUIRE(high_contrast_limit(1.0, 10.0, 1.0, 0.0) == 10.0);
    REQUIRE_THROWS_AS(high_contrast_limit(1.0, 10.0, 1.5, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(low_contrast_limit(1.0, 10.0, t3, -1.0), std::invalid_argument);

    // The exact value walks into each asymptote as the layer fraction shrinks.
    double prev_hi = std::numeric_limits<double>::infinity();
    double prev_lo = prev_hi;
    for (double t2 : {1e-2, 1e-3, 1e-4}) {
        double hi_dev = std::abs(exact_sigma_star(1.0, 1.0 / t2, 10.0, kTheta1, t2) -
                                 6.3475461986900055) /
                        6.3475461986900055;
        double lo_dev = std::abs(exact_sigma_star(1.0, 10.0 * t2, 10.0, kTheta1, t2) -
                                 5.3611329775325529) /
                        5.3611329775325529;
        REQUIRE(hi_dev < prev_hi);
        REQUIRE(lo_dev < prev_lo);
        prev_hi = hi_dev;
        prev_lo = lo_dev;
    }
    REQUIRE(prev_hi < 1e-3);
    REQUIRE(prev_lo < 1e-3);
}

TEST_CASE("laminate closed forms and their sanity relations", "[assemblage]") {
    double arith = laminate_sigma_star({2.0, 8.0}, {0.25, 0.75}, LayerOrientation::Parallel);
    double harm =
        laminate_sigma_star({2.0, 8.0}, {0.25, 0.75}, LayerOrientation::Perpendicular);
    REQUIRE_THAT(arith, WithinRel(6.5, 1e-15));
    REQUIRE_THAT(harm, WithinRel(1.0 / (0.25 / 2.0 + 0.75 / 8.0), 1e-15));
    REQUIRE(arith >= harm);
    REQUIRE_THROWS_AS(laminate_sigma_star({1.0, 2.0}, {0.5, 0.6}, LayerOrientation::Parallel),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(laminate_sigma_star({1.0}, {0.5, 0.5}, LayerOrientation::Parallel),
                      std::invalid_argument);
}

TEST_CASE("intermediate-contrast band bounds the layer conductivity", "[assemblage]") {
    REQUIRE(sigma2_in_intermediate_band(1.0, 5.0, 10.0));
    REQUIRE(sigma2_in_intermediate_band(1.0, 0.2, 10.0));
    REQUIRE_FALSE(sigma2_in_intermediate_band(1.0, 0.05, 10.0));
    REQUIRE_FALSE(sigma2_in_intermediate_band(1.0, 200.0, 10.0));
}
