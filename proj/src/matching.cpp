// SPDX-License-Identifier: Apache-2.0
#include "icn/matching.hpp"

#include <algorithm>
#include <cmath>

#include "icn/circuit.hpp"
#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"

namespace icn::matching {

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}
}  // namespace

double divider_attenuation(double L2, double L_Tx) {
    require_positive(L2, "L2");
    require_positive(L_Tx, "L_Tx");
    return L2 / (L2 + L_Tx);
}

double spr(double L2, double L_Tx, double Q, double f1, double i_r) {
    require_positive(Q, "Q");
    require_positive(f1, "f1");
    require_positive(i_r, "i_r");
    const double r2 = angular(f1) * L2 / Q;
    return divider_attenuation(L2, L_Tx) / (i_r * i_r * r2);
}

double nspr(double L2, double L_Tx) {
    // SPR is proportional to 1 / (L2 + L_Tx); its supremum 1 / L_Tx is reached as L2 -> 0
    require_positive(L2, "L2");
    require_positive(L_Tx, "L_Tx");
    return L_Tx / (L2 + L_Tx);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    require_positive(lo, "grid start");
    if (!(hi > lo) || points < 2) throw DomainError("log grid needs hi > lo and >= 2 points");
    std::vector<double> g(points);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) g[i] = std::exp(a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

MatchingSweep sweep(const std::vector<double>& ratios, double L_Tx, double Q, double f1, bool grid_normalized) {
    require_positive(L_Tx, "L_Tx");
    if (ratios.empty()) throw DomainError("matching sweep needs at least one ratio");
    MatchingSweep s;
    s.ratio = ratios;
    const double w = angular(f1);
    double best = 0.0;
    std::vector<double> raw;
    for (double r : ratios) {
        const double L2 = r * L_Tx;
        s.v_rx.push_back(divider_attenuation(L2, L_Tx));
        s.power.push_back(w * L2 / Q);
        raw.push_back(spr(L2, L_Tx, Q, f1));
        best = std::max(best, raw.back());
    }
    // SPR = Q / (w (L2 + L_Tx)); the L2 -> 0 limit is Q / (w L_Tx)
    const double norm = grid_normalized ? best : Q / (w * L_Tx);
    for (double v : raw) s.nspr.push_back(v / norm);
    return s;
}

double find_tradeoff(double L_Tx, double Q, double f1) {
    require_positive(L_Tx, "L_Tx");
    require_positive(Q, "Q");
    require_positive(f1, "f1");
    // bisection on log L2 for v_rx = 1/2
    double lo = std::log(L_Tx) - 30.0, hi = std::log(L_Tx) + 30.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (divider_attenuation(std::exp(mid), L_Tx) < 0.5 ? lo : hi) = mid;
    }
    const double L2 = std::exp(0.5 * (lo + hi));
    if (std::abs(nspr(L2, L_Tx) - 0.5) > 1e-9) throw AccuracyError("signal and NSPR crossings do not coincide");
    return L2;
}

double to_db(double normalized) {
    require_positive(normalized, "normalized quantity");
    return 10.0 * std::log10(normalized);
}

std::string verdict(double L2, double L_Tx) {
    require_positive(L2, "L2");
    require_positive(L_Tx, "L_Tx");
    const double d = std::abs(std::log(L2 / L_Tx));
    if (d <= 0.01) return "matched";
    if (d < 0.2) return "nearly matched";
    return L2 < L_Tx ? "mismatched: L2 below L_Tx" : "mismatched: L2 above L_Tx";
}

double mna_rx_fraction(double L2, double L_Tx, double Q, double f1, double f, double split) {
    require_positive(Q, "Q");
    require_positive(f, "f");
    const double w1 = angular(f1);
    const double r2 = w1 * L2 / Q, rtx = w1 * L_Tx / Q;
    // uncoupled secondary: the primary only needs to exist for the netlist
    const magnetics::TwoPortParams p{1e-6, L2, 0.0, 0.0, r2, f1};
    circuit::HcrOptions opt;
    opt.split = split < 0.0 ? L2 / (L2 + L_Tx) : split;
    const auto h = circuit::build_hcr(p, L_Tx, rtx, f1, opt);
    const auto net = h.netlist.with_source(circuit::kPrimarySource, 0.0).with_source(circuit::kHarmonicSource, 1.0);
    return std::abs(circuit::solve_ac(net, f).probe(circuit::kRxProbe));
}

std::string sweep_csv(const MatchingSweep& s) {
    std::string out = "L2_over_LTx,v_rx_norm,nspr,v_rx_dB,nspr_dB\n";
    for (std::size_t i = 0; i < s.ratio.size(); ++i) {
        out += format::sci9(s.ratio[i]) + "," + format::sci9(s.v_rx[i]) + "," + format::sci9(s.nspr[i]) + "," +
               format::sci9(to_db(s.v_rx[i])) + "," + format::sci9(to_db(s.nspr[i])) + "\n";
    }
    return out;
}

}  // namespace icn::matching
