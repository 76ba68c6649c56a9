// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace icn::matching {

struct MatchingSweep {
    std::vector<double> ratio;  // L2 / L_Tx
    std::vector<double> v_rx;   // received harmonic fraction of v_max
    std::vector<double> power;  // i_r^2 R2 at unit loop current, watts
    std::vector<double> nspr;
};

double divider_attenuation(double L2, double L_Tx);

// Signal-to-power ratio at constant Q (R2 = w L2 / Q) with a unit harmonic source.
double spr(double L2, double L_Tx, double Q, double f1, double i_r = 1.0);

// SPR relative to its supremum over L2 in (0, inf), which is approached as L2 -> 0.
double nspr(double L2, double L_Tx);

// Same normalization as `nspr` unless `grid_normalized`, which divides by the grid maximum instead.
MatchingSweep sweep(const std::vector<double>& ratios, double L_Tx, double Q, double f1, bool grid_normalized = false);

std::vector<double> log_grid(double lo, double hi, int points);

// L2 where the normalized signal and NSPR both reach one half.
double find_tradeoff(double L_Tx, double Q, double f1);

double to_db(double normalized);  // 10 log10

std::string verdict(double L2, double L_Tx);

// Received fraction from a full-circuit solve: harmonic source in the L_Tx branch at f,
// symmetric HCR tuned at f1. A negative split selects banks that each resonate their own inductor.
double mna_rx_fraction(double L2, double L_Tx, double Q, double f1, double f, double split = 0.5);

std::string sweep_csv(const MatchingSweep& s);

}  // namespace icn::matching
