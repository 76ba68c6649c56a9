// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace icn::format {

/// Scientific notation with 9 significant digits ("%.8e").
std::string sci9(double v);

/// Value rounded to 9 significant digits (round-trips through sci9).
double round9(double v);

}  // namespace icn::format
