// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace icn::quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

inline constexpr int kMaxOrder = 64;

/// Cached rule of the given order, 1 <= order <= kMaxOrder.
const Rule& gauss_legendre(int order);

/// Integrate f over [a, b] with the given rule.
template <class F>
double integrate(F&& f, double a, double b, const Rule& rule) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

}  // namespace icn::quadrature
