// SPDX-License-Identifier: Apache-2.0
#include "icn/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace icn::format {

std::string sci9(double v) {
    if (v == 0.0) v = 0.0;  // drop negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

double round9(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(sci9(v).c_str(), nullptr);
}

}  // namespace icn::format
