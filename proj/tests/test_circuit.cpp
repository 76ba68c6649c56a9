// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "icn/circuit.hpp"
#include "icn/constants.hpp"
#include "icn/errors.hpp"

using namespace icn;
using namespace icn::circuit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using magnetics::TwoPortParams;

namespace {

// Built transformers with the measured values.
const TwoPortParams kIcn1{6.65e-6, 16.7e-6, 6.08e-6, 0.233, 0.0125, 25699.0};
const TwoPortParams kIcn2{6.85e-6, 7.8e-6, 4.39e-6, 0.210, 0.0058, 26042.0};
constexpr double kLTx1 = 14.4e-6, kRTx1 = 0.0172;
constexpr double kLTx2 = 9.74e-6, kRTx2 = 0.0109;

}  // namespace

TEST_CASE("series RLC at resonance", "[circuit]") {
    const double L = 10e-6, C = 1e-6, f0 = 1.0 / (2.0 * kPi * std::sqrt(L * C));
    Netlist n;
    for (auto s : {"a", "b", "c", "0"}) n.add_node(s);
    n.voltage_source("V", "a", "0", 1.0).resistor("R", "a", "b", 1.0).inductor("L", "b", "c", L).capacitor("C", "c", "0", C);
    n.set_ground("0");
    const auto s = solve_ac(n, f0);
    CHECK_THAT(std::abs(s.current("R")), WithinRel(1.0, 1e-12));
    CHECK_THAT(std::arg(s.current("R")), WithinAbs(0.0, 1e-12));
    CHECK(s.kcl_residual < 1e-12);
    const auto p = power_balance(n, s);
    CHECK_THAT(p.delivered, WithinRel(0.5, 1e-12));
    CHECK_THAT(p.dissipated, WithinRel(p.delivered, 1e-12));
}

TEST_CASE("resistive divider and floating references", "[circuit]") {
    Netlist n;
    for (auto s : {"a", "m", "0"}) n.add_node(s);
    n.voltage_source("V", "a", "0", 2.0).resistor("R1", "a", "m", 50.0).resistor("R2", "m", "0", 50.0);
    n.voltage_probe("vm", "m", "0");
    n.set_ground("0");
    CHECK_THAT(std::abs(solve_ac(n, 1e3).voltage("m")), WithinRel(1.0, 1e-14));
    // floating: the solver picks its own reference, differential quantities are unchanged
    Netlist f = n;
    f.set_ground("a");
    CHECK_THAT(std::abs(solve_ac(f, 1e3).probe("vm")), WithinRel(1.0, 1e-14));
}

TEST_CASE("netlist validation and singular networks", "[circuit]") {
    Netlist n;
    n.add_node("a");
    n.add_node("0");
    CHECK_THROWS_AS(n.resistor("R", "a", "b", 1.0), TopologyError);
    CHECK_THROWS_AS(n.resistor("R", "a", "0", -1.0), DomainError);
    n.inductor("L1", "a", "0", 1e-6);
    CHECK_THROWS_AS(n.mutual("K", "L1", "L9", 0.5), TopologyError);
    n.add_node("b");
    n.inductor("L2", "b", "0", 1e-6);
    CHECK_THROWS_AS(n.mutual("K", "L1", "L2", 1.0), DomainError);
    CHECK_THROWS_AS(solve_ac(n, 1e3), TopologyError);  // no source
    n.voltage_source("V1", "a", "0", 1.0);
    n.voltage_source("V2", "a", "0", 2.0);
    try {
        solve_ac(n, 1e3);
        FAIL("expected a singular matrix");
    } catch (const SingularMatrixError& e) {
        const auto& nodes = e.nodes();
        CHECK(std::find(nodes.begin(), nodes.end(), "a") != nodes.end());
    }
    Netlist lone;
    for (auto s : {"a", "0", "z"}) lone.add_node(s);
    lone.voltage_source("V", "a", "0", 1.0).resistor("R", "a", "0", 1.0);
    CHECK_THROWS_AS(solve_ac(lone, 1e3), TopologyError);
}

TEST_CASE("tuning the resonator", "[circuit]") {
    const auto c = tune_hcr(31.1e-6, 25699.0);
    const double w = 2.0 * kPi * 25699.0;
    const double cs = 1.0 / (w * w * 31.1e-6);
    CHECK_THAT(cs, WithinRel(1.233e-6, 1e-3));
    CHECK_THAT(c.C1, WithinRel(2.0 * cs, 1e-14));
    CHECK(c.C1 == c.C2);
    const auto u = tune_hcr(31.1e-6, 25699.0, 0.25);
    CHECK_THAT(1.0 / (1.0 / u.C1 + 1.0 / u.C2), WithinRel(cs, 1e-14));
    CHECK_THROWS_AS(tune_hcr(0.0, 1e3), DomainError);

    const auto h = build_hcr(kIcn1, kLTx1, kRTx1, kIcn1.f);
    CHECK(std::abs(analyze_hcr(h).loop_reactance) < 1e-6);
    // the tuned loop's own current peaks at f1 on the default sweep
    const auto grid = default_grid(kIcn1.f);
    REQUIRE(grid.size() == 2001);
    CHECK(grid.front() == Catch::Approx(0.9 * kIcn1.f));
    CHECK(grid.back() == Catch::Approx(1.1 * kIcn1.f));
    auto peak = [&](const Netlist& n) {
        const auto sols = solve_ac(n, grid);
        std::size_t best = 0;
        for (std::size_t i = 0; i < sols.size(); ++i)
            if (std::abs(sols[i].current(kL2)) > std::abs(sols[best].current(kL2))) best = i;
        return static_cast<long>(best);
    };
    auto bare = kIcn1;
    bare.M = 0.0;
    const auto hb = build_hcr(bare, kLTx1, kRTx1, bare.f);
    CHECK(peak(hb.netlist.with_source(kPrimarySource, 0.0).with_source(kHarmonicSource, 1.0)) == 1000);
}

TEST_CASE("HCR quality factor for the built channels", "[circuit]") {
    CHECK_THAT(gain_formula(kIcn1, kRTx1).Q, WithinRel(90.8, 0.01));
    CHECK_THAT(gain_formula(kIcn2, kRTx2).Q, WithinRel(76.4, 0.01));
    // the same from the solved loop: stored over dissipated energy per radian
    for (auto [p, ltx, rtx] : {std::tuple{kIcn1, kLTx1, kRTx1}, std::tuple{kIcn2, kLTx2, kRTx2}}) {
        const auto h = build_hcr(p, ltx, rtx, p.f);
        const auto s = solve_ac(h.netlist, p.f);
        const double i2 = std::abs(s.current(kL2));
        const double loss = 0.5 * i2 * i2 * (p.R2 + rtx);
        const double w = 2.0 * kPi * p.f;
        CHECK_THAT(w * 0.5 * p.L2 * i2 * i2 / loss, WithinRel(gain_formula(p, rtx).Q, 1e-9));
    }
}

TEST_CASE("gain formula", "[circuit]") {
    const auto g1 = gain_formula(kIcn1, kRTx1);
    CHECK_THAT(g1.R_s, WithinRel(0.0297, 1e-12));
    CHECK_THAT(g1.G, WithinRel(33.0, 0.01));
    CHECK_THAT(g1.G, WithinRel(g1.Q * g1.k * g1.n, 1e-12));
    CHECK_THAT(gain_formula(kIcn2, kRTx2).G, WithinRel(43.0, 0.01));
    CHECK_THAT(90.8 * 0.57 * 0.63, WithinAbs(32.6, 0.05));
    CHECK_THROWS_AS(gain_formula({1e-6, 1e-6, 0.5e-6, 0, 0, 1e3}, 0.0), DomainError);
}

TEST_CASE("factorization identity for random inputs", "[circuit]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double L1 = std::exp(-16 + 6 * u(rng)), L2 = std::exp(-16 + 6 * u(rng));
        const double M = u(rng) * std::sqrt(L1 * L2);
        const TwoPortParams p{L1, L2, M, u(rng), u(rng) + 1e-4, 1e3 + 1e5 * u(rng)};
        const auto g = gain_formula(p, u(rng));
        CHECK_THAT(g.G, WithinRel(g.Q * g.k * g.n, 1e-12));
    }
}

TEST_CASE("input impedance", "[circuit]") {
    CHECK_THAT(input_impedance(kIcn1, kRTx1), WithinRel(32.6, 0.02));
    CHECK_THAT(input_impedance(kIcn2, kRTx2), WithinRel(31.1, 0.02));
    auto p = kIcn1;
    p.M = 0.0;
    CHECK(input_impedance(p, kRTx1) == p.R1);
    for (auto [q, ltx, rtx] : {std::tuple{kIcn1, kLTx1, kRTx1}, std::tuple{kIcn2, kLTx2, kRTx2}}) {
        const auto r = analyze_hcr(build_hcr(q, ltx, rtx, q.f));
        CHECK_THAT(r.z_prim.real(), WithinRel(input_impedance(q, rtx), 1e-9));
        CHECK(std::abs(r.z_prim.imag()) < 1e-3 * r.z_prim.real());
    }
}

TEST_CASE("matching capacitor", "[circuit]") {
    const double w = 2.0 * kPi * 25699.0;
    const double cm = matching_capacitor(6.65e-6, 0.57, 25699.0);
    CHECK_THAT(cm, WithinRel(1.0 / (w * w * 2.8595e-6), 1e-12));
    CHECK_THAT(cm, WithinRel(13.4e-6, 0.005));
    CHECK(matching_capacitor(6.65e-6, 0.0, 25699.0) == matching_capacitor_exact(6.65e-6, 25699.0));
    CHECK_THROWS_AS(matching_capacitor(6.65e-6, 1.0, 25699.0), DomainError);
    // the leakage-only capacitor leaves the magnetizing reactance w L1 k uncancelled
    HcrOptions leak;
    leak.exact_matching = false;
    const double k = kIcn1.M / std::sqrt(kIcn1.L1 * kIcn1.L2);
    const auto r = analyze_hcr(build_hcr(kIcn1, kLTx1, kRTx1, kIcn1.f, leak));
    CHECK_THAT(r.z_prim.imag(), WithinRel(w * kIcn1.L1 * k, 1e-9));
    const auto e = analyze_hcr(build_hcr(kIcn1, kLTx1, kRTx1, kIcn1.f));
    CHECK(std::abs(e.z_prim.imag()) < 1e-3 * std::abs(e.z_prim));
}

TEST_CASE("coupling from short and open measurements", "[circuit]") {
    CHECK(measured_k_from_short_open(6.65e-6, 6.65e-6) == 0.0);
    CHECK_THAT(measured_k_from_short_open(6.65e-6, 6.65e-6 * (1.0 - 0.57 * 0.57)), WithinRel(0.570, 1e-12));
    CHECK_THAT(measured_k_from_short_open(6.65e-6, 4.49e-6), WithinAbs(0.570, 1e-3));
    CHECK_THROWS_AS(measured_k_from_short_open(4e-6, 5e-6), DomainError);

    const TwoPortParams p{5e-6, 20e-6, 0.8 * std::sqrt(100e-12), 0.0, 0.0, 25e3};
    const double w = 2.0 * kPi * p.f;
    auto l_in = [&](Termination t) {
        const auto s = solve_ac(two_port_netlist(p, t), p.f);
        return std::imag(1.0 / (-s.current(kPrimarySource))) / w;
    };
    CHECK_THAT(measured_k_from_short_open(l_in(Termination::open), l_in(Termination::shorted)), WithinAbs(0.8, 1e-3));
}

TEST_CASE("solver invariants over random resonators", "[circuit]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double f = 1e4 + 9e4 * u(rng);
        const double L1 = 1e-6 * (1 + 20 * u(rng)), L2 = 1e-6 * (1 + 50 * u(rng)), ltx = 1e-6 * (1 + 50 * u(rng));
        const double k = 0.05 + 0.9 * u(rng);
        const double Q = 20.0 + 280.0 * u(rng);
        const double w = 2.0 * kPi * f;
        const double rs = w * L2 / Q;
        const double r2 = rs * u(rng);
        const TwoPortParams p{L1, L2, k * std::sqrt(L1 * L2), 0.5 * u(rng), r2, f};
        const auto h = build_hcr(p, ltx, rs - r2, f);
        const auto sweep = solve_ac(h.netlist, {0.9 * f, f, 1.07 * f});
        for (const auto& s : sweep) {
            CHECK(s.kcl_residual < 1e-9);
            const auto pb = power_balance(h.netlist, s);
            CHECK_THAT(pb.dissipated, WithinRel(pb.delivered, 1e-9));
            CHECK(std::real(1.0 / (-s.current(kPrimarySource))) > 0.0);
        }
        // gain equivalence with zero capacitor ESR
        const auto r = analyze_hcr(h);
        CHECK_THAT(r.gain, WithinRel(w * p.M / rs, 0.005));
    }
}

TEST_CASE("symmetric loop taps are virtual grounds", "[circuit]") {
    const TwoPortParams lossless{6e-6, 14.4e-6, 5e-6, 0.2, 0.0, 25699.0};
    CHECK(analyze_hcr(build_hcr(lossless, 14.4e-6, 0.0, lossless.f)).rx_ratio < 1e-6);
    // with losses only the drop across R_Tx remains: |v_TxRx| / |v_L2| = R_Tx / |jwL - R_Tx|
    const TwoPortParams p{6e-6, 14.4e-6, 5e-6, 0.2, 0.0172, 25699.0};
    const double wl = 2.0 * kPi * p.f * 14.4e-6;
    CHECK_THAT(analyze_hcr(build_hcr(p, 14.4e-6, 0.0172, p.f)).rx_ratio, WithinRel(0.0172 / std::hypot(wl, 0.0172), 1e-9));
    // a mismatched loop does not cancel the fundamental at the taps
    CHECK(analyze_hcr(build_hcr(lossless, 7e-6, 0.0, p.f)).rx_ratio > 0.1);
}

TEST_CASE("zero coupling gives zero gain", "[circuit]") {
    auto p = kIcn1;
    p.M = 0.0;
    const auto r = analyze_hcr(build_hcr(p, kLTx1, kRTx1, p.f));
    CHECK(r.gain == 0.0);
    CHECK_THAT(r.z_prim.real(), WithinRel(p.R1, 1e-9));
    CHECK(std::abs(r.loop_reactance) < 1e-6);
}

TEST_CASE("sweep CSV", "[circuit]") {
    Netlist n;
    for (auto s : {"a", "b", "0"}) n.add_node(s);
    n.voltage_source("V", "a", "0", 1.0).current_probe("ir", "a", "b").resistor("R", "b", "0", 2.0);
    n.voltage_probe("va", "a", "0");
    const auto csv = sweep_csv(n, solve_ac(n, std::vector<double>{1e3}));
    CHECK(csv == "f_Hz,ir_re_A,ir_im_A,va_re_V,va_im_V\n"
                 "1.00000000e+03,5.00000000e-01,0.00000000e+00,1.00000000e+00,0.00000000e+00\n");
}
