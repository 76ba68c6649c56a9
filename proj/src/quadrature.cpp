// SPDX-License-Identifier: Apache-2.0
#include "icn/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "icn/errors.hpp"

namespace icn::quadrature {
namespace {

Rule build(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int order) {
    static const std::array<Rule, kMaxOrder + 1> rules = [] {
        std::array<Rule, kMaxOrder + 1> out;
        for (int n = 1; n <= kMaxOrder; ++n) out[n] = build(n);
        return out;
    }();
    if (order < 1 || order > kMaxOrder) throw DomainError("gauss_legendre: unsupported order");
    return rules[order];
}

}  // namespace icn::quadrature
