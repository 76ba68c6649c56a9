// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>

namespace icn {

inline constexpr double kPi = std::numbers::pi;
/// Vacuum permeability in H/m (classical value 4*pi*1e-7).
inline constexpr double kMu0 = 4.0e-7 * kPi;

inline constexpr double angular(double f_hz) { return 2.0 * kPi * f_hz; }

}  // namespace icn
