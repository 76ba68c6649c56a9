// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "icn/circuit.hpp"
#include "icn/constants.hpp"
#include "icn/errors.hpp"

namespace icn::circuit {

Capacitors tune_hcr(double L_total, double f1, double split) {
    if (!(L_total > 0.0)) throw DomainError("tune_hcr: total inductance must be positive");
    if (!(f1 > 0.0)) throw DomainError("tune_hcr: frequency must be positive");
    if (!(split > 0.0 && split < 1.0)) throw DomainError("tune_hcr: split must lie in (0, 1)");
    const double w = angular(f1);
    const double cs = 1.0 / (w * w * L_total);
    return {cs / split, cs / (1.0 - split)};
}

Hcr build_hcr(const magnetics::TwoPortParams& p, double L_Tx, double R_Tx, double f1, const HcrOptions& opt) {
    p.validate();
    if (!(L_Tx > 0.0)) throw DomainError("build_hcr: L_Tx must be positive");
    if (!(R_Tx >= 0.0)) throw DomainError("build_hcr: R_Tx must be non-negative");
    Hcr h;
    h.f1 = f1;
    h.caps = tune_hcr(p.L2 + L_Tx, f1, opt.split);
    const double k = p.M / std::sqrt(p.L1 * p.L2);

    Netlist& n = h.netlist;
    for (const char* node : {"p_in", "p_a", "p_ret", "s1", "s2", "m1", "t1", "x", "y", "t2", "m2"}) n.add_node(node);
    n.voltage_source(kPrimarySource, "p_in", "p_ret", opt.source_volts, f1);
    if (opt.matching_capacitor) {
        h.C_m = opt.exact_matching ? matching_capacitor_exact(p.L1, f1) : matching_capacitor(p.L1, k, f1);
        n.capacitor("Cm", "p_in", "p_a", h.C_m, opt.capacitor_esr);
    } else {
        n.current_probe("i_prim", "p_in", "p_a");
    }
    n.inductor(kL1, "p_a", "p_ret", p.L1, p.R1);

    // symmetric loop; each capacitor bank is split in two so its midpoint can be tapped
    n.inductor(kL2, "s1", "s2", p.L2, p.R2);
    n.capacitor("C1a", "s2", "m1", 2.0 * h.caps.C1, opt.capacitor_esr);
    n.capacitor("C1b", "m1", "t1", 2.0 * h.caps.C1, opt.capacitor_esr);
    n.inductor("LTx_a", "t1", "x", 0.5 * L_Tx, 0.5 * R_Tx);
    n.voltage_source(kHarmonicSource, "x", "y", 0.0, 2.0 * f1);
    n.inductor("LTx_b", "y", "t2", 0.5 * L_Tx, 0.5 * R_Tx);
    n.capacitor("C2a", "t2", "m2", 2.0 * h.caps.C2, opt.capacitor_esr);
    n.capacitor("C2b", "m2", "s1", 2.0 * h.caps.C2, opt.capacitor_esr);
    if (k != 0.0) n.mutual("K12", kL1, kL2, k);
    n.voltage_probe(kRxProbe, "m1", "m2");
    n.voltage_probe(kL2Probe, "s1", "s2");
    n.validate();
    return h;
}

GainReport gain_formula(const magnetics::TwoPortParams& p, double R_Tx) {
    p.validate();
    GainReport g;
    g.R_s = p.R2 + R_Tx;
    if (!(g.R_s > 0.0)) throw DomainError("gain: secondary series resistance R2 + R_Tx must be positive");
    const double w = angular(p.f);
    g.G = w * p.M / g.R_s;
    g.Q = w * p.L2 / g.R_s;
    g.k = p.M / std::sqrt(p.L1 * p.L2);
    g.n = std::sqrt(p.L1 / p.L2);
    const double qkn = g.Q * g.k * g.n;
    if (g.G > 0.0 && std::abs(qkn - g.G) > 1e-12 * g.G)
        throw AccuracyError("gain factorization Qkn does not reproduce wM/R_s");
    return g;
}

double input_impedance(const magnetics::TwoPortParams& p, double R_Tx) {
    const auto g = gain_formula(p, R_Tx);
    const double w = angular(p.f);
    return p.R1 + w * w * p.M * p.M / g.R_s;
}

double matching_capacitor(double L1, double k, double f1) {
    if (!(k >= 0.0 && k < 1.0)) throw DomainError("matching capacitor: k must lie in [0, 1)");
    if (!(L1 > 0.0) || !(f1 > 0.0)) throw DomainError("matching capacitor: L1 and f1 must be positive");
    const double w = angular(f1);
    return 1.0 / (w * w * L1 * (1.0 - k));
}

double matching_capacitor_exact(double L1, double f1) { return matching_capacitor(L1, 0.0, f1); }

double measured_k_from_short_open(double L1_open, double L1_short) {
    if (!(L1_short > 0.0) || !(L1_open > 0.0)) throw DomainError("short/open inductances must be positive");
    if (L1_short > L1_open) throw DomainError("shorted primary inductance exceeds the open value");
    return std::sqrt(1.0 - L1_short / L1_open);
}

Netlist two_port_netlist(const magnetics::TwoPortParams& p, Termination t) {
    p.validate();
    Netlist n;
    for (const char* node : {"p_in", "p_ret", "s1", "s2"}) n.add_node(node);
    n.voltage_source(kPrimarySource, "p_in", "p_ret", 1.0, p.f);
    n.inductor(kL1, "p_in", "p_ret", p.L1, p.R1);
    if (t == Termination::shorted) {
        n.inductor(kL2, "s1", "s2", p.L2, p.R2);
        n.current_probe("short", "s2", "s1");
    } else {
        n.inductor(kL2, "s1", "s2", p.L2, p.R2);
        // s2 is left dangling apart from a probe
        n.voltage_probe("v_open", "s1", "s2");
    }
    const double k = p.M / std::sqrt(p.L1 * p.L2);
    if (k != 0.0) n.mutual("K12", kL1, kL2, k);
    return n;
}

HcrResult analyze_hcr(const Hcr& h) {
    const auto sol = solve_ac(h.netlist, h.f1);
    HcrResult r;
    const cplx i1 = sol.current(kL1), i2 = sol.current(kL2);
    r.gain = std::abs(i2 / i1);
    r.z_prim = std::polar(h.netlist.element(kPrimarySource).value, h.netlist.element(kPrimarySource).phase) /
               (-sol.current(kPrimarySource));
    const double w = angular(h.f1);
    if (h.netlist.has_element("K12")) {
        const auto& l1 = h.netlist.element(kL1);
        const auto& l2 = h.netlist.element(kL2);
        const double M = h.netlist.element("K12").value * std::sqrt(l1.value * l2.value);
        // L2 branch: v(L2) = Z(L2) i2 + jwM i1 and the loop closes, so Z_loop i2 = -jwM i1
        r.loop_reactance = std::imag(-cplx(0.0, w * M) * i1 / i2);
    } else {
        // no coupling: drive the loop from its own series source instead
        const auto s = solve_ac(h.netlist.with_source(kPrimarySource, 0.0).with_source(kHarmonicSource, 1.0), h.f1);
        r.loop_reactance = std::imag(1.0 / (-s.current(kHarmonicSource)));
    }
    const double vl2 = std::abs(sol.probe(kL2Probe));
    r.rx_ratio = vl2 > 0.0 ? std::abs(sol.probe(kRxProbe)) / vl2 : 0.0;
    return r;
}

}  // namespace icn::circuit
