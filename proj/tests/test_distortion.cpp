// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "icn/distortion.hpp"
#include "icn/errors.hpp"

using namespace icn;
using namespace icn::distortion;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("magnetization curve", "[distortion]") {
    const MagnetizationCurve c{2.0, 1.75};
    for (double h : {0.01, 0.3, 1.0, 5.0, 15.0}) {
        CHECK(c(-h) == -c(h));
        CHECK(std::abs(c(h)) < 1.0);
        CHECK(c(h) > c(0.99 * h));
    }
    CHECK_THAT(c(2.0), WithinRel(std::tanh(1.75), 1e-15));
    CHECK_THROWS_AS((MagnetizationCurve{0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((MagnetizationCurve{1.0, -1.0}.validate()), DomainError);
}

TEST_CASE("linear curve is distortion free", "[distortion]") {
    MagnetizationCurve lin;
    lin.linear = true;
    const auto r = thd_of_curve(lin, 0.5);
    CHECK(r.thd_f < 1e-12);
    CHECK_THAT(r.fundamental, WithinRel(0.5, 1e-12));
}

TEST_CASE("calibrated THD points", "[distortion]") {
    const MagnetizationCurve c;
    const auto hi = thd_of_curve(c, 0.14);
    CHECK_THAT(hi.thd_percent(), WithinRel(0.5, 0.10));
    const auto lo = thd_of_curve(c, 0.01);
    CHECK(lo.thd_percent() > 2.3e-3);
    CHECK(lo.thd_percent() < 3.3e-3);
    CHECK_THAT(lo.thd_percent(), WithinRel(2.55e-3, 0.01));
}

TEST_CASE("small-signal series", "[distortion]") {
    CHECK_THAT(small_signal_thd(0.2449), WithinRel(0.005, 1e-3));
    CHECK_THAT(small_signal_thd(0.0175), WithinRel(2.552e-5, 1e-3));
    CHECK_THAT(small_signal_thd(0.0175), WithinRel(3e-5, 0.16));
    std::vector<std::string> w;
    small_signal_thd(0.4, &w);
    CHECK(w.empty());
    small_signal_thd(0.6, &w);
    CHECK(w.size() == 1);

    const MagnetizationCurve unit{1.0, 1.0};
    for (double a : {0.01, 0.05, 0.1, 0.15})
        CHECK_THAT(thd_of_curve(unit, a).thd_f, WithinRel(small_signal_thd(a), 0.05));
    CHECK_THAT(thd_of_curve(unit, 0.02).thd_f / (0.02 * 0.02), WithinRel(1.0 / 12.0, 0.02));
}

TEST_CASE("spectral properties", "[distortion]") {
    const MagnetizationCurve c;
    double prev = 0.0;
    for (double a : {0.005, 0.01, 0.05, 0.14, 0.3, 0.7, 1.5, 4.0}) {
        const auto r = thd_of_curve(c, a, 21);
        for (std::size_t i = 0; i < r.harmonics.size(); i += 2)  // n = 2, 4, ...
            CHECK(r.harmonics[i] < 1e-10 * r.fundamental);
        CHECK(r.thd_f > prev);
        prev = r.thd_f;
        double s = 0.5 * r.fundamental * r.fundamental;
        for (double h : r.harmonics) s += 0.5 * h * h;
        CHECK(s <= r.mean_square * (1.0 + 1e-12));
        CHECK_THAT(s, WithinRel(r.mean_square, a < 1.0 ? 1e-12 : 1e-4));
    }
}

TEST_CASE("aliasing guard and sweep", "[distortion]") {
    const MagnetizationCurve c;
    CHECK_THROWS_AS(thd_of_curve(c, 0.1, 4), DomainError);
    CHECK_THROWS_AS(thd_of_curve(c, 0.1, 100, 4096), DomainError);
    CHECK_THROWS_AS(thd_of_curve(c, 0.1, 15, 2048), DomainError);
    CHECK_NOTHROW(thd_of_curve(c, 0.1, 100));
    CHECK_THROWS_AS(thd_of_curve(c, 0.0), DomainError);
    const auto s = thd_sweep(c, {0.01, 0.14}, 15, 2);
    CHECK(s[1].thd_f == thd_of_curve(c, 0.14).thd_f);
}

TEST_CASE("filter chain budget", "[distortion]") {
    const double r = chain_thd_budget(0.005, {65, 100, 150});
    const double each = 0.005 / std::sqrt(3.0);
    const double g2 = std::pow(10.0, -65.0 / 20.0), g3 = 1e-5, g4 = std::pow(10.0, -150.0 / 20.0);
    CHECK_THAT(r, WithinRel(each * std::sqrt(g2 * g2 + g3 * g3 + g4 * g4), 1e-12));
    CHECK_THAT(r, WithinRel(each * std::pow(10.0, -65.0 / 20.0), 1e-3));  // second harmonic dominates
    CHECK(r > 1e-6);
    CHECK(r < 1e-5);
    CHECK_THAT(chain_thd_budget(0.005, {0, 0, 0}), WithinRel(0.005, 1e-14));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(chain_thd_budget(0.005, {inf, inf, inf}) == 0.0);
    CHECK_THROWS_AS(chain_thd_budget(0.005, {}), DomainError);
}

TEST_CASE("spectrum csv", "[distortion]") {
    const auto r = thd_of_curve(MagnetizationCurve{}, 0.14, 5);
    const auto csv = spectrum_csv(r);
    CHECK(csv.rfind("harmonic_index,amplitude_rel_fundamental\n1,1.00000000e+00\n2,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
