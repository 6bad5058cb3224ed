#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "hkb/potential.hpp"

using hkb::HalfLinePiece;
using hkb::PieceKind;
using hkb::Potential;

namespace {

std::vector<Potential> radial_family(int d) {
    return {Potential::polynomial(d, 1.0, 2.0),   Potential::polynomial(d, 2.0, 1.0),
            Potential::polynomial(d, 1.0, 4.0),   Potential::logarithmic(d, 1.0, 1.5),
            Potential::decaying(d, 1.0, 1.0),     Potential::decaying(d, 2.0, 3.0),
            Potential::constant(d, 0.7),          Potential::bounded_away(d, 1.5, 1.0)};
}

std::vector<Potential> mixtures() {
    return {Potential::mixture_1d({PieceKind::power, 1.0, 2.0}, {PieceKind::power, 1.0, 1.0}),
            Potential::mixture_1d({PieceKind::decaying, 1.0, 3.0}, {PieceKind::decaying, 1.0, 1.0}),
            Potential::mixture_1d({PieceKind::power, 1.0, 2.0}, {PieceKind::decaying, 1.0, 1.0}),
            Potential::mixture_1d({PieceKind::power, 1.0, 1.0}, {PieceKind::constant, 1.0, 1.0})};
}

// brute force extrema over a fine 1-D grid
double brute_inf_1d(const Potential& v, double centre, double radius) {
    double m = INFINITY;
    for (int i = 0; i <= 20000; ++i) m = std::min(m, v.eval_1d(centre - radius + 2.0 * radius * i / 20000.0));
    return m;
}

double brute_sup_1d(const Potential& v, double radius) {
    double m = -INFINITY;
    for (int i = 0; i <= 20000; ++i) m = std::max(m, v.eval_1d(-radius + 2.0 * radius * i / 20000.0));
    return m;
}

}  // namespace

TEST_CASE("catalogue values") {
    const double x[2] = {3.0, 4.0};
    CHECK(Potential::polynomial(2, 2.0, 2.0)(x) == doctest::Approx(50.0));
    CHECK(Potential::logarithmic(2, 1.0, 2.0)(x) == doctest::Approx(std::pow(std::log(7.0), 2)));
    CHECK(Potential::decaying(2, 1.0, 1.0)(x) == doctest::Approx(0.2));
    const double inner[2] = {0.1, 0.2};
    CHECK(Potential::decaying(2, 3.0, 2.0)(inner) == 3.0);
    CHECK(Potential::bounded_away(2, 2.0, 5.0)(x) == 2.0);
    CHECK(Potential::bounded_away(2, 2.0, 5.1)(x) == 0.0);
    CHECK(Potential::constant(2, 0.25)(x) == 0.25);

    const auto mix = Potential::mixture_1d({PieceKind::power, 1.0, 2.0}, {PieceKind::decaying, 1.0, 1.0});
    CHECK(mix.eval_1d(-3.0) == doctest::Approx(9.0));
    CHECK(mix.eval_1d(4.0) == doctest::Approx(0.25));
    CHECK(mix.eval_1d(0.5) == 1.0);
    CHECK_FALSE(mix.is_radial());
}

TEST_CASE("classification") {
    CHECK(Potential::polynomial(1, 1.0, 2.0).is_harmonic());
    CHECK_FALSE(Potential::polynomial(1, 1.0, 4.0).is_harmonic());
    CHECK(Potential::polynomial(3, 1.0, 1.0).is_confining());
    CHECK(Potential::logarithmic(1, 1.0, 1.0).is_confining());
    CHECK_FALSE(Potential::decaying(1, 1.0, 1.0).is_confining());
    CHECK(Potential::constant(2, 0.0).is_zero());
    CHECK(Potential::constant(2, 1.5).constant_value() == 1.5);
    CHECK(Potential::bounded_away(1, 2.0, 0.0).constant_value() == 2.0);
    CHECK_FALSE(Potential::bounded_away(1, 2.0, 1.0).constant_value());
    CHECK(Potential::polynomial(1, 1.0, 2.0).describe() == "polynomial(d=1;k=1;alpha=2)");
}

TEST_CASE("invalid construction is rejected") {
    CHECK_THROWS_AS(Potential::polynomial(0, 1.0, 2.0), hkb::UsageError);
    CHECK_THROWS_AS(Potential::polynomial(1, -1.0, 2.0), hkb::UsageError);
    CHECK_THROWS_AS(Potential::decaying(1, 1.0, 0.0), hkb::UsageError);
    CHECK_THROWS_AS(Potential::constant(1, -0.5), hkb::UsageError);
    const double x[2] = {0.0, 0.0};
    CHECK_THROWS_AS(Potential::polynomial(1, 1.0, 2.0)(x), hkb::UsageError);
}

TEST_CASE("property: analytic profiles bracket the potential on their balls") {
    gen::Rng rng(11);
    for (int d = 1; d <= 3; ++d) {
        for (const auto& v : radial_family(d)) {
            for (int trial = 0; trial < 60; ++trial) {
                const auto x = rng.point(d, 6.0);
                const double r = hkb::norm(x);
                const auto lo = hkb::lower_profile(v, x);
                REQUIRE(lo.exact());
                // any z in B_{|x|/2}(x) has V(z) >= V_*(x)
                auto z = rng.point(d, 0.5 * r);
                for (int j = 0; j < d; ++j) z[j] += x[j];
                CHECK(v(z) >= lo.value - 1e-12);
                CHECK(v(x) >= lo.value - 1e-12);

                const double s = rng.uniform(0.0, 4.0);
                const auto up = hkb::upper_profile(v, s);
                REQUIRE(up.exact());
                const auto w = rng.point(d, 2.0 * s);
                CHECK(v(w) <= up.value + 1e-12);
                // V^* is nondecreasing
                CHECK(hkb::upper_profile(v, s + rng.uniform(0.0, 1.0)).value >= up.value);
                // V_*(x) <= V(x) <= V^*(|x|/2) and V_*(x) <= V^*(|x|)
                CHECK(lo.value <= hkb::upper_profile(v, r).value + 1e-12);
            }
        }
    }
}

TEST_CASE("property: sampled profiles are directional estimates of the analytic ones") {
    gen::Rng rng(12);
    hkb::SamplingControl s;
    s.force_sampling = true;
    s.n_samples = 2048;
    for (int d = 1; d <= 3; ++d) {
        for (const auto& v : radial_family(d)) {
            for (int trial = 0; trial < 8; ++trial) {
                const auto x = rng.point(d, 5.0);
                const auto exact_lo = hkb::lower_profile(v, x);
                const auto sampled_lo = hkb::lower_profile(v, x, s);
                CHECK(sampled_lo.rigor == hkb::ProfileRigor::sampled_upper);
                CHECK(sampled_lo.value >= exact_lo.value - 1e-12);
                if (v.kind() != hkb::PotentialKind::bounded_away)
                    CHECK(sampled_lo.value <= exact_lo.value + 0.05 * (1.0 + exact_lo.value));
                const double r = rng.uniform(0.1, 3.0);
                const auto exact_up = hkb::upper_profile(v, r);
                const auto sampled_up = hkb::upper_profile(v, r, s);
                CHECK(sampled_up.rigor == hkb::ProfileRigor::sampled_lower);
                CHECK(sampled_up.value <= exact_up.value * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}

TEST_CASE("mixtures: profiles depend on the side of the origin") {
    gen::Rng rng(13);
    for (const auto& v : mixtures()) {
        for (int trial = 0; trial < 40; ++trial) {
            const double x = rng.uniform(-6.0, 6.0);
            const double xs[1] = {x};
            CHECK(hkb::lower_profile(v, xs).value ==
                  doctest::Approx(brute_inf_1d(v, x, 0.5 * std::fabs(x))).epsilon(1e-6));
            const double r = rng.uniform(0.0, 3.0);
            CHECK(hkb::upper_profile(v, r).value == doctest::Approx(brute_sup_1d(v, 2.0 * r)).epsilon(1e-6));
        }
    }
    const auto v = mixtures()[0];  // x^2 on the left, x on the right
    const double left[1] = {-2.0}, right[1] = {2.0};
    CHECK(hkb::lower_profile(v, left).value == doctest::Approx(1.0));
    CHECK(hkb::lower_profile(v, right).value == doctest::Approx(1.0));
    const double left4[1] = {-4.0}, right4[1] = {4.0};
    CHECK(hkb::lower_profile(v, left4).value == doctest::Approx(4.0));
    CHECK(hkb::lower_profile(v, right4).value == doctest::Approx(2.0));
}

TEST_CASE("doubling constant") {
    const std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
    for (double alpha : {1.0, 2.0, 4.0})
        CHECK(*hkb::doubling_constant(Potential::polynomial(1, 1.0, alpha), radii) ==
              doctest::Approx(std::pow(4.0, alpha)));
    CHECK(*hkb::doubling_constant(Potential::constant(2, 1.0), radii) == 1.0);
    // V_* vanishes near the origin while V^* is positive
    CHECK_FALSE(hkb::doubling_constant(Potential::bounded_away(1, 1.0, 3.0), radii));
    const double m = *hkb::doubling_constant(Potential::logarithmic(1, 1.0, 2.0), radii);
    CHECK(m >= 1.0);
    CHECK(m <= 9.0);
}

TEST_CASE("custom potentials fall back to sampling") {
    const Potential v = Potential::custom(
        2, [](std::span<const double> z) { return z[0] * z[0] + 2.0 * z[1] * z[1]; }, "aniso", true);
    const double x[2] = {2.0, 0.0};
    const auto lo = hkb::lower_profile(v, x);
    CHECK_FALSE(lo.exact());
    // the true infimum over B_1((2,0)) is 1, at (1,0)
    CHECK(lo.value >= 1.0 - 1e-12);
    CHECK(lo.value <= 1.01);
    const auto up = hkb::upper_profile(v, 1.0);
    CHECK(up.value <= 8.0 + 1e-12);
    CHECK(up.value >= 7.9);
}
