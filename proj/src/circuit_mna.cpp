// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>

#include "icn/circuit.hpp"
#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"
#include "parallel.hpp"

namespace icn::circuit {

namespace {

bool is_branch(ElementKind k) {
    return k == ElementKind::inductor || k == ElementKind::voltage_source || k == ElementKind::current_probe;
}

bool conducts(ElementKind k) { return k != ElementKind::mutual && k != ElementKind::voltage_probe; }

// Frequency-independent part of the MNA layout.
struct Layout {
    std::unordered_map<std::string, int> node;    // node -> unknown index, -1 for references
    std::vector<std::string> node_names;
    std::unordered_map<std::string, int> branch;  // element -> current unknown index
    int size = 0;
};

Layout layout(const Netlist& net) {
    const auto& nodes = net.nodes();
    std::unordered_map<std::string, int> id;
    for (std::size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = static_cast<int>(i);
    std::vector<int> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : net.elements())
        if (conducts(e.kind)) parent[find(id[e.a])] = find(id[e.b]);

    // one reference per galvanically connected component; the declared ground wins
    std::unordered_map<int, int> ref;
    if (!net.ground().empty()) ref[find(id[net.ground()])] = id[net.ground()];
    for (std::size_t i = 0; i < nodes.size(); ++i) ref.emplace(find(static_cast<int>(i)), static_cast<int>(i));

    Layout L;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const bool is_ref = ref[find(static_cast<int>(i))] == static_cast<int>(i);
        L.node[nodes[i]] = is_ref ? -1 : L.size++;
        if (!is_ref) L.node_names.push_back(nodes[i]);
    }
    for (const auto& e : net.elements())
        if (is_branch(e.kind)) L.branch[e.name] = L.size++;
    return L;
}

cplx admittance(const Element& e, double w) {
    if (e.kind == ElementKind::resistor) return 1.0 / e.value;
    // capacitor with optional ESR; open circuit at DC
    if (w == 0.0) return 0.0;
    return 1.0 / (cplx(e.series_r, 0.0) + 1.0 / cplx(0.0, w * e.value));
}

std::vector<std::string> singular_nodes(const Eigen::FullPivLU<Eigen::MatrixXcd>& lu, const Layout& L,
                                        const Netlist& net) {
    const Eigen::MatrixXcd ker = lu.kernel();
    std::set<std::string> out;
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
        const double mx = ker.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < ker.rows(); ++r) {
            if (std::abs(ker(r, c)) <= 1e-8 * mx) continue;
            if (r < static_cast<Eigen::Index>(L.node_names.size())) {
                out.insert(L.node_names[r]);
                continue;
            }
            for (const auto& [name, idx] : L.branch)
                if (idx == r) {
                    const auto& e = net.element(name);
                    out.insert(e.a);
                    out.insert(e.b);
                }
        }
    }
    return {out.begin(), out.end()};
}

ACSolution solve_one(const Netlist& net, const Layout& L, double f) {
    const double w = angular(f);
    const int n = L.size;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    auto vi = [&](const std::string& node) { return L.node.at(node); };

    for (const auto& e : net.elements()) {
        const int a = e.kind == ElementKind::mutual ? -1 : vi(e.a);
        const int b = e.kind == ElementKind::mutual ? -1 : vi(e.b);
        switch (e.kind) {
            case ElementKind::resistor:
            case ElementKind::capacitor: {
                const cplx y = admittance(e, w);
                if (a >= 0) A(a, a) += y;
                if (b >= 0) A(b, b) += y;
                if (a >= 0 && b >= 0) A(a, b) -= y, A(b, a) -= y;
                break;
            }
            case ElementKind::inductor:
            case ElementKind::voltage_source:
            case ElementKind::current_probe: {
                const int k = L.branch.at(e.name);
                // branch current flows a -> b through the element
                if (a >= 0) A(a, k) += 1.0, A(k, a) += 1.0;
                if (b >= 0) A(b, k) -= 1.0, A(k, b) -= 1.0;
                if (e.kind == ElementKind::inductor) A(k, k) -= cplx(e.series_r, w * e.value);
                if (e.kind == ElementKind::voltage_source) rhs(k) = std::polar(e.value, e.phase);
                break;
            }
            case ElementKind::mutual: {
                const auto& l1 = net.element(e.a);
                const auto& l2 = net.element(e.b);
                const cplx zm(0.0, w * e.value * std::sqrt(l1.value * l2.value));
                const int k1 = L.branch.at(l1.name), k2 = L.branch.at(l2.name);
                A(k1, k2) -= zm;
                A(k2, k1) -= zm;
                break;
            }
            case ElementKind::voltage_probe: break;
        }
    }
    // row equilibration keeps the rank test meaningful across ohm/henry scales
    for (int r = 0; r < n; ++r) {
        const double s = A.row(r).cwiseAbs().maxCoeff();
        if (s > 0.0) A.row(r) /= s, rhs(r) /= s;
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        const auto bad = singular_nodes(lu, L, net);
        std::string list;
        for (const auto& s : bad) list += (list.empty() ? "" : ", ") + s;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g Hz", f);
        throw SingularMatrixError("singular circuit matrix at " + std::string(buf) + "; involved nodes: " + list, bad);
    }
    const Eigen::VectorXcd x = lu.solve(rhs);

    ACSolution sol;
    sol.frequency = f;
    auto volt = [&](const std::string& node) {
        const int i = vi(node);
        return i < 0 ? cplx(0.0) : x(i);
    };
    for (const auto& node : net.nodes()) sol.node_voltages[node] = volt(node);
    std::unordered_map<std::string, cplx> leaving;
    double imax = 0.0;
    for (const auto& e : net.elements()) {
        cplx i;
        if (e.kind == ElementKind::mutual) continue;
        if (e.kind == ElementKind::voltage_probe) {
            sol.probe_voltages[e.name] = volt(e.a) - volt(e.b);
            continue;
        }
        if (is_branch(e.kind))
            i = x(L.branch.at(e.name));
        else
            i = admittance(e, w) * (volt(e.a) - volt(e.b));
        sol.branch_currents[e.name] = i;
        leaving[e.a] += i;
        leaving[e.b] -= i;
        imax = std::max(imax, std::abs(i));
    }
    double worst = 0.0;
    for (const auto& [node, s] : leaving) worst = std::max(worst, std::abs(s));
    sol.kcl_residual = imax > 0.0 ? worst / imax : worst;
    return sol;
}

}  // namespace

cplx ACSolution::voltage(const std::string& node) const {
    const auto it = node_voltages.find(node);
    if (it == node_voltages.end()) throw TopologyError("no node named '" + node + "'");
    return it->second;
}

cplx ACSolution::current(const std::string& element) const {
    const auto it = branch_currents.find(element);
    if (it == branch_currents.end()) throw TopologyError("no current for element '" + element + "'");
    return it->second;
}

cplx ACSolution::probe(const std::string& name) const {
    const auto it = probe_voltages.find(name);
    if (it != probe_voltages.end()) return it->second;
    return current(name);
}

ACSolution solve_ac(const Netlist& net, double f) { return solve_ac(net, std::vector<double>{f}).front(); }

std::vector<ACSolution> solve_ac(const Netlist& net, const std::vector<double>& frequencies, int threads) {
    net.validate();
    for (double f : frequencies)
        if (!(f >= 0.0) || !std::isfinite(f)) throw DomainError("frequencies must be finite and non-negative");
    const Layout L = layout(net);
    return detail::parallel_map<ACSolution>(frequencies.size(), static_cast<unsigned>(std::max(threads, 0)),
                                            [&](std::size_t i) { return solve_one(net, L, frequencies[i]); });
}

PowerBalance power_balance(const Netlist& net, const ACSolution& sol) {
    PowerBalance p;
    for (const auto& e : net.elements()) {
        double r = 0.0;
        switch (e.kind) {
            case ElementKind::voltage_source: {
                const cplx v = std::polar(e.value, e.phase);
                p.delivered -= 0.5 * std::real(v * std::conj(sol.current(e.name)));
                continue;
            }
            case ElementKind::resistor: r = e.value; break;
            case ElementKind::inductor:
            case ElementKind::capacitor: r = e.series_r; break;
            default: continue;
        }
        p.dissipated += 0.5 * std::norm(sol.current(e.name)) * r;
    }
    return p;
}

std::vector<double> default_grid(double f1, int points, double span) {
    if (!(f1 > 0.0) || points < 3 || points % 2 == 0 || !(span > 0.0 && span < 1.0))
        throw DomainError("frequency grid needs f1 > 0, an odd point count >= 3 and 0 < span < 1");
    // u in [-1, 1] mapped with an exponential grading that clusters samples at f1
    const double alpha = 4.0;
    std::vector<double> f(points);
    const int half = (points - 1) / 2;
    for (int i = 0; i < points; ++i) {
        const double u = static_cast<double>(i - half) / half;
        const double g = std::copysign(std::expm1(alpha * std::abs(u)) / std::expm1(alpha), u);
        f[i] = f1 * (1.0 + span * g);
    }
    f[half] = f1;
    return f;
}

std::string sweep_csv(const Netlist& net, const std::vector<ACSolution>& sols) {
    std::vector<std::pair<std::string, const char*>> cols;
    for (const auto& e : net.elements()) {
        if (e.kind == ElementKind::voltage_probe) cols.push_back({e.name, "V"});
        if (e.kind == ElementKind::current_probe) cols.push_back({e.name, "A"});
    }
    std::string out = "f_Hz";
    for (const auto& [name, unit] : cols) out += "," + name + "_re_" + unit + "," + name + "_im_" + unit;
    out += "\n";
    for (const auto& s : sols) {
        out += format::sci9(s.frequency);
        for (const auto& [name, unit] : cols) {
            const cplx v = s.probe(name);
            out += "," + format::sci9(v.real()) + "," + format::sci9(v.imag());
        }
        out += "\n";
    }
    return out;
}

}  // namespace icn::circuit
