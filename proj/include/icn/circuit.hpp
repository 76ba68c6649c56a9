// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "icn/magnetics.hpp"

namespace icn::circuit {

using cplx = std::complex<double>;

enum class ElementKind { resistor, inductor, capacitor, mutual, voltage_source, current_probe, voltage_probe };

std::string to_string(ElementKind k);
ElementKind element_kind_from_string(const std::string& s);

struct Element {
    ElementKind kind = ElementKind::resistor;
    std::string name;
    std::string a, b;       // terminals; for mutual: the two inductor names
    double value = 0.0;     // ohms, henries, farads, coupling k, or source amplitude in volts
    double series_r = 0.0;  // inductor winding resistance or capacitor ESR
    double phase = 0.0;     // source phase, radians
    double frequency = 0.0; // nominal source frequency (informational)
};

// Netlists are immutable once handed to the solver; the builders below produce them.
class Netlist {
  public:
    void add_node(const std::string& name);
    bool has_node(const std::string& name) const;
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<Element>& elements() const { return elements_; }
    const Element& element(const std::string& name) const;
    bool has_element(const std::string& name) const;

    void set_ground(const std::string& node);
    const std::string& ground() const { return ground_; }

    Netlist& resistor(const std::string& name, const std::string& a, const std::string& b, double ohms);
    Netlist& inductor(const std::string& name, const std::string& a, const std::string& b, double henries,
                      double series_r = 0.0);
    Netlist& capacitor(const std::string& name, const std::string& a, const std::string& b, double farads,
                       double esr = 0.0);
    Netlist& mutual(const std::string& name, const std::string& l1, const std::string& l2, double k);
    Netlist& voltage_source(const std::string& name, const std::string& plus, const std::string& minus, double volts,
                            double frequency = 0.0, double phase = 0.0);
    Netlist& current_probe(const std::string& name, const std::string& from, const std::string& to);
    Netlist& voltage_probe(const std::string& name, const std::string& plus, const std::string& minus);
    Netlist& add(const Element& e);

    // Copy with one source amplitude changed (sources switched off by setting 0 V).
    Netlist with_source(const std::string& name, double volts, double phase = 0.0) const;
    // Copy with a source removed, leaving its terminals open.
    Netlist without_source(const std::string& name) const;

    void validate() const;

  private:
    std::vector<std::string> nodes_;
    std::vector<Element> elements_;
    std::string ground_;
    void require_node(const std::string& n, const std::string& elem) const;
};

struct ACSolution {
    double frequency = 0.0;
    std::map<std::string, cplx> node_voltages;  // relative to the per-component reference
    std::map<std::string, cplx> branch_currents;  // every two-terminal element, flowing a -> b
    std::map<std::string, cplx> probe_voltages;
    double kcl_residual = 0.0;  // max node current imbalance / max branch current

    cplx voltage(const std::string& node) const;
    cplx current(const std::string& element) const;
    cplx probe(const std::string& voltage_probe) const;
};

ACSolution solve_ac(const Netlist& net, double f);
std::vector<ACSolution> solve_ac(const Netlist& net, const std::vector<double>& frequencies, int threads = 0);

struct PowerBalance {
    double delivered = 0.0;   // active power out of all sources (peak-phasor convention, 1/2 Re V I*)
    double dissipated = 0.0;  // sum of 1/2 |I|^2 R over resistive parts
};
PowerBalance power_balance(const Netlist& net, const ACSolution& sol);

// 2001 points over [0.9 f1, 1.1 f1], graded toward f1; f1 itself is the centre sample.
std::vector<double> default_grid(double f1, int points = 2001, double span = 0.1);

std::string sweep_csv(const Netlist& net, const std::vector<ACSolution>& sols);

// ---- HCR and ICN builders ----

struct Capacitors {
    double C1 = 0.0, C2 = 0.0;
};
Capacitors tune_hcr(double L_total, double f1, double split = 0.5);

struct HcrOptions {
    double split = 0.5;
    bool matching_capacitor = true;
    bool exact_matching = true;  // C_m from 1/(w^2 L1) rather than the leakage-only form
    double source_volts = 1.0;
    double capacitor_esr = 0.0;
};

struct Hcr {
    Netlist netlist;
    double f1 = 0.0;
    Capacitors caps;
    double C_m = 0.0;  // 0 when omitted
};

// Element names used by build_hcr.
inline constexpr const char* kPrimarySource = "V1";
inline constexpr const char* kHarmonicSource = "Vh";
inline constexpr const char* kL1 = "L1";
inline constexpr const char* kL2 = "L2";
inline constexpr const char* kRxProbe = "v_TxRx";
inline constexpr const char* kL2Probe = "v_L2";

Hcr build_hcr(const magnetics::TwoPortParams& p, double L_Tx, double R_Tx, double f1, const HcrOptions& opt = {});

struct GainReport {
    double G = 0.0;
    double Q = 0.0;  // w L2 / R_s
    double k = 0.0;
    double n = 0.0;
    double R_s = 0.0;
};
GainReport gain_formula(const magnetics::TwoPortParams& p, double R_Tx);
double input_impedance(const magnetics::TwoPortParams& p, double R_Tx);

double matching_capacitor(double L1, double k, double f1);
double matching_capacitor_exact(double L1, double f1);

double measured_k_from_short_open(double L1_open, double L1_short);

enum class Termination { open, shorted };
// Bare transformer driven on the primary, secondary open or shorted.
Netlist two_port_netlist(const magnetics::TwoPortParams& p, Termination t);

struct HcrResult {
    double gain = 0.0;               // |i2 / i1| at f1
    cplx z_prim;                     // V1 / i1 at f1
    double loop_reactance = 0.0;     // Im of the secondary loop impedance at f1
    double rx_ratio = 0.0;           // |v_TxRx| / |v_L2| at f1
};
HcrResult analyze_hcr(const Hcr& h);

}  // namespace icn::circuit
