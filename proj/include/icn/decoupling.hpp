// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "icn/circuit.hpp"
#include "icn/magnetics.hpp"

namespace icn::decoupling {

struct ChannelConfig {
    double f_r = 0.0;
    double L_Tx = 0.0, R_Tx = 0.0;
    double L2 = 0.0, R2 = 0.0;
    magnetics::TwoPortParams two_port;  // ICN of the channel; L2/R2 above are its secondary
    double i_r = 1.0;                   // nominal loop current amplitude, for the capacitor rating

    double loop_inductance() const { return L2 + L_Tx; }
    double series_resistance() const { return R2 + R_Tx; }
    void validate() const;
};

// Channel from an ICN two-port and its drive-field coil.
ChannelConfig make_channel(const magnetics::TwoPortParams& icn, double L_Tx, double R_Tx);

struct CoupledRatio {
    double closed_form = 0.0;  // w1 k / (4 dw)
    double step1 = 0.0;        // w1 M / (2 dw (L_Tx + L2)): detuned loop as j 2 dw L only
    double exact = 0.0;        // w1 M / |Z_HCR,2(w1)|
    std::vector<std::string> warnings;
};
CoupledRatio coupled_current_ratio(const ChannelConfig& ch1, const ChannelConfig& ch2, double k_inter);

struct DetunedImpedance {
    std::complex<double> exact;
    std::complex<double> first_order;  // R_s (1 + j 2 (dw/w2) Q), Q = w2 L / R_s
    std::complex<double> simplified;   // j 2 dw L
    double Q = 0.0;
};
DetunedImpedance detuned_impedance(const ChannelConfig& ch, double delta_omega);

double common_capacitor(const ChannelConfig& ch1, const ChannelConfig& ch2, double k_inter);
double mutual_between(const ChannelConfig& a, const ChannelConfig& b, double k_inter);

enum class Scheme { none, common_capacitor, per_channel_capacitors, series_inductive, separate_winding };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct PairElement {
    int i = 0, j = 0;
    double M = 0.0;       // inter-channel mutual being cancelled
    double value = 0.0;   // farads for capacitive schemes, henries (compensating mutual) for inductive
    double omega = 0.0;   // cancellation frequency for capacitive schemes
};

struct DecouplingDesign {
    Scheme scheme = Scheme::none;
    std::vector<PairElement> elements;  // one shared capacitor (i = j = -1) or one entry per channel pair
    double comp_coupling = 0.9;         // |k| of the compensating element pair (inductive schemes)
    double capacitor_current = 0.0;     // peak current through a shared capacitor at nominal loop currents
    std::vector<std::string> warnings;
};

// Element values for a scheme; capacitive schemes require positive inter-channel couplings.
DecouplingDesign design(const std::vector<ChannelConfig>& channels, const Eigen::MatrixXd& k, Scheme scheme);

enum class PrimaryTermination { open, shorted };

struct CoupledSystem {
    circuit::Netlist netlist;
    std::vector<ChannelConfig> channels;
    DecouplingDesign design;
    static std::string source(int ch);  // primary source of channel ch
    static std::string coil(int ch);    // L_Tx element of channel ch
};

CoupledSystem build_coupled_system(const std::vector<ChannelConfig>& channels, const Eigen::MatrixXd& k,
                                   const DecouplingDesign& design);

struct Suppression {
    double frequency = 0.0;
    int aggressor = 0;
    double ratio_with = 0.0;     // worst victim / aggressor loop-current ratio with the scheme
    double ratio_without = 0.0;  // same network without the scheme
    double improvement_db = 0.0;
    double absolute_db = 0.0;    // 20 log10 ratio_with
};

// Victim / aggressor loop currents at a single frequency with one channel driven.
double crosstalk_ratio(const CoupledSystem& sys, int aggressor, double f,
                       PrimaryTermination victims = PrimaryTermination::open);

std::vector<Suppression> verify_suppression(const CoupledSystem& with_scheme, const CoupledSystem& without_scheme,
                                            PrimaryTermination victims = PrimaryTermination::open);

std::string victim_sweep_csv(const CoupledSystem& sys, int aggressor, const std::vector<double>& frequencies,
                             PrimaryTermination victims = PrimaryTermination::open);

}  // namespace icn::decoupling
