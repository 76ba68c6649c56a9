// SPDX-License-Identifier: Apache-2.0
#include "icn/distortion.hpp"

#include <cmath>
#include <cstdio>
#include <complex>
#include <limits>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"
#include "parallel.hpp"

namespace icn::distortion {

namespace {
template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}
}  // namespace

double MagnetizationCurve::operator()(double H) const {
    const double x = H / H_sat;
    return linear ? x : std::tanh(sigma * x);
}

void MagnetizationCurve::validate() const {
    if (!(H_sat > 0.0) || !std::isfinite(H_sat)) throw DomainError("H_sat must be positive");
    if (!linear && (!(sigma > 0.0) || !std::isfinite(sigma))) throw DomainError("shape scale sigma must be positive");
}

ThdReport thd_of_curve(const MagnetizationCurve& curve, double amplitude, int n_harmonics, int samples) {
    curve.validate();
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("amplitude must be positive");
    if (n_harmonics < 5) throw DomainError("need at least 5 harmonics");
    if (samples == 0) samples = std::max(4096, 64 * n_harmonics);
    if (samples < 4096 || samples < 64 * n_harmonics)
        throw DomainError(fmt("aliasing guard: %d samples for %d harmonics (need >= max(4096, 64 n))", samples,
                              n_harmonics));

    std::vector<double> y(samples);
    double ms = 0.0;
    for (int k = 0; k < samples; ++k) {
        y[k] = curve(amplitude * curve.H_sat * std::sin(2.0 * kPi * k / samples));
        ms += y[k] * y[k];
    }
    ThdReport r;
    r.amplitude = amplitude;
    r.mean_square = ms / samples;
    double sum2 = 0.0;
    for (int n = 1; n <= n_harmonics; ++n) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < samples; ++k) {
            // reduce the phase index first so large n*k keeps full precision
            const long idx = (static_cast<long>(n) * k) % samples;
            acc += y[k] * std::polar(1.0, -2.0 * kPi * static_cast<double>(idx) / samples);
        }
        const double a = 2.0 * std::abs(acc) / samples;
        if (n == 1) {
            r.fundamental = a;
        } else {
            r.harmonics.push_back(a);
            sum2 += a * a;
        }
    }
    if (r.fundamental == 0.0) throw AccuracyError("fundamental vanished");
    r.thd_f = std::sqrt(sum2) / r.fundamental;
    return r;
}

std::vector<ThdReport> thd_sweep(const MagnetizationCurve& curve, const std::vector<double>& amplitudes,
                                 int n_harmonics, int threads) {
    return detail::parallel_map<ThdReport>(amplitudes.size(), static_cast<unsigned>(std::max(threads, 0)),
                                           [&](std::size_t i) { return thd_of_curve(curve, amplitudes[i], n_harmonics); });
}

double small_signal_thd(double amplitude_effective, std::vector<std::string>* warnings) {
    if (!std::isfinite(amplitude_effective)) throw DomainError("effective amplitude must be finite");
    const double a = std::abs(amplitude_effective);
    if (a > 0.5 && warnings)
        warnings->push_back(fmt("small-signal THD inaccurate at a_eff = %.3g (> 0.5)", a));
    return a * a / 12.0;
}

double chain_thd_budget(double amplifier_thd, const std::vector<double>& attenuation_db) {
    if (!(amplifier_thd >= 0.0) || !std::isfinite(amplifier_thd)) throw DomainError("amplifier THD must be >= 0");
    if (attenuation_db.empty()) throw DomainError("need attenuations for harmonics 2..N");
    const double each = amplifier_thd / std::sqrt(static_cast<double>(attenuation_db.size()));
    double sum2 = 0.0;
    for (double db : attenuation_db) {
        if (std::isnan(db)) throw DomainError("attenuation is NaN");
        const double g = std::isinf(db) ? (db > 0 ? 0.0 : std::numeric_limits<double>::infinity())
                                        : std::pow(10.0, -db / 20.0);
        sum2 += each * each * g * g;
    }
    return std::sqrt(sum2);
}

std::string spectrum_csv(const ThdReport& r) {
    std::string s = "harmonic_index,amplitude_rel_fundamental\n";
    s += "1," + format::sci9(1.0) + "\n";
    for (std::size_t i = 0; i < r.harmonics.size(); ++i)
        s += std::to_string(i + 2) + "," + format::sci9(r.harmonics[i] / r.fundamental) + "\n";
    return s;
}

}  // namespace icn::distortion
