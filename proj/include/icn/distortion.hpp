// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace icn::distortion {

inline constexpr double kDefaultSigma = 1.75;

// M(H) = tanh(sigma H / H_sat), normalized to +-1. `linear` gives the sigma -> 0 shape M = H / H_sat.
struct MagnetizationCurve {
    double H_sat = 1.0;
    double sigma = kDefaultSigma;
    bool linear = false;

    double operator()(double H) const;
    void validate() const;
};

struct ThdReport {
    double amplitude = 0.0;          // drive, fraction of H_sat
    double fundamental = 0.0;        // a_1
    std::vector<double> harmonics;   // a_2 .. a_N
    double thd_f = 0.0;              // ratio
    double mean_square = 0.0;        // of the synthesized output waveform

    double thd_percent() const { return 100.0 * thd_f; }
};

// One period of amplitude * H_sat * sin through the curve, harmonics by discrete Fourier projection.
// `samples` = 0 picks max(4096, 64 n_harmonics).
ThdReport thd_of_curve(const MagnetizationCurve& curve, double amplitude, int n_harmonics = 15, int samples = 0);

// Independent amplitude points, evaluated in parallel.
std::vector<ThdReport> thd_sweep(const MagnetizationCurve& curve, const std::vector<double>& amplitudes,
                                 int n_harmonics = 15, int threads = 0);

// Leading-order tanh THD, a_eff^2 / 12 with a_eff = sigma a.
double small_signal_thd(double amplitude_effective, std::vector<std::string>* warnings = nullptr);

// Residual THD_F after per-harmonic amplitude attenuations (dB, harmonics 2, 3, ...) applied to an amplifier
// spectrum of equal-amplitude harmonics normalized to `amplifier_thd`. +inf dB removes a harmonic.
double chain_thd_budget(double amplifier_thd, const std::vector<double>& attenuation_db);

std::string spectrum_csv(const ThdReport& r);

}  // namespace icn::distortion
