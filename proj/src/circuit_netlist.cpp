// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "icn/circuit.hpp"
#include "icn/errors.hpp"

namespace icn::circuit {

namespace {
const std::pair<ElementKind, const char*> kKindNames[] = {
    {ElementKind::resistor, "resistor"},
    {ElementKind::inductor, "inductor"},
    {ElementKind::capacitor, "capacitor"},
    {ElementKind::mutual, "mutual"},
    {ElementKind::voltage_source, "voltage_source"},
    {ElementKind::current_probe, "current_probe"},
    {ElementKind::voltage_probe, "voltage_probe"},
};
}  // namespace

std::string to_string(ElementKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "unknown";
}

ElementKind element_kind_from_string(const std::string& s) {
    for (const auto& [kind, name] : kKindNames)
        if (s == name) return kind;
    throw DomainError("unknown element kind '" + s + "'");
}

void Netlist::add_node(const std::string& name) {
    if (name.empty()) throw DomainError("node names must be non-empty");
    if (!has_node(name)) nodes_.push_back(name);
}

bool Netlist::has_node(const std::string& name) const {
    return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

bool Netlist::has_element(const std::string& name) const {
    return std::any_of(elements_.begin(), elements_.end(), [&](const Element& e) { return e.name == name; });
}

const Element& Netlist::element(const std::string& name) const {
    for (const auto& e : elements_)
        if (e.name == name) return e;
    throw TopologyError("no element named '" + name + "'");
}

void Netlist::set_ground(const std::string& node) {
    require_node(node, "ground");
    ground_ = node;
}

void Netlist::require_node(const std::string& n, const std::string& elem) const {
    if (!has_node(n)) throw TopologyError("element '" + elem + "' references unknown node '" + n + "'");
}

Netlist& Netlist::add(const Element& e) {
    if (e.name.empty()) throw DomainError("element names must be non-empty");
    if (has_element(e.name)) throw TopologyError("duplicate element name '" + e.name + "'");
    auto positive = [&](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(e.name + ": " + what + " must be positive and finite");
    };
    switch (e.kind) {
        case ElementKind::resistor: positive(e.value, "resistance"); break;
        case ElementKind::inductor: positive(e.value, "inductance"); break;
        case ElementKind::capacitor: positive(e.value, "capacitance"); break;
        case ElementKind::mutual: {
            if (!(std::abs(e.value) < 1.0)) throw DomainError(e.name + ": coupling k must lie in (-1, 1)");
            for (const auto* l : {&e.a, &e.b}) {
                if (!has_element(*l) || element(*l).kind != ElementKind::inductor)
                    throw TopologyError(e.name + ": '" + *l + "' is not an inductor");
            }
            if (e.a == e.b) throw TopologyError(e.name + ": an inductor cannot couple to itself");
            break;
        }
        case ElementKind::voltage_source:
            if (!std::isfinite(e.value)) throw DomainError(e.name + ": amplitude must be finite");
            break;
        default: break;
    }
    if (e.series_r < 0.0) throw DomainError(e.name + ": series resistance must be non-negative");
    if (e.kind != ElementKind::mutual) {
        require_node(e.a, e.name);
        require_node(e.b, e.name);
    }
    elements_.push_back(e);
    return *this;
}

Netlist& Netlist::resistor(const std::string& name, const std::string& a, const std::string& b, double ohms) {
    return add({ElementKind::resistor, name, a, b, ohms});
}

Netlist& Netlist::inductor(const std::string& name, const std::string& a, const std::string& b, double henries,
                           double series_r) {
    return add({ElementKind::inductor, name, a, b, henries, series_r});
}

Netlist& Netlist::capacitor(const std::string& name, const std::string& a, const std::string& b, double farads,
                            double esr) {
    return add({ElementKind::capacitor, name, a, b, farads, esr});
}

Netlist& Netlist::mutual(const std::string& name, const std::string& l1, const std::string& l2, double k) {
    return add({ElementKind::mutual, name, l1, l2, k});
}

Netlist& Netlist::voltage_source(const std::string& name, const std::string& plus, const std::string& minus,
                                 double volts, double frequency, double phase) {
    return add({ElementKind::voltage_source, name, plus, minus, volts, 0.0, phase, frequency});
}

Netlist& Netlist::current_probe(const std::string& name, const std::string& from, const std::string& to) {
    return add({ElementKind::current_probe, name, from, to});
}

Netlist& Netlist::voltage_probe(const std::string& name, const std::string& plus, const std::string& minus) {
    return add({ElementKind::voltage_probe, name, plus, minus});
}

Netlist Netlist::with_source(const std::string& name, double volts, double phase) const {
    Netlist out = *this;
    for (auto& e : out.elements_)
        if (e.name == name) {
            if (e.kind != ElementKind::voltage_source) throw TopologyError("'" + name + "' is not a source");
            e.value = volts;
            e.phase = phase;
            return out;
        }
    throw TopologyError("no element named '" + name + "'");
}

Netlist Netlist::without_source(const std::string& name) const {
    if (element(name).kind != ElementKind::voltage_source) throw TopologyError("'" + name + "' is not a source");
    Netlist out = *this;
    out.elements_.erase(std::remove_if(out.elements_.begin(), out.elements_.end(),
                                       [&](const Element& e) { return e.name == name; }),
                        out.elements_.end());
    return out;
}

void Netlist::validate() const {
    std::set<std::string> used;
    bool source = false;
    for (const auto& e : elements_) {
        if (e.kind == ElementKind::voltage_source) source = true;
        if (e.kind == ElementKind::mutual || e.kind == ElementKind::voltage_probe) continue;
        used.insert(e.a);
        used.insert(e.b);
    }
    if (!source) throw TopologyError("netlist has no source");
    for (const auto& n : nodes_)
        if (!used.count(n)) throw TopologyError("node '" + n + "' is not connected to any element");
}

}  // namespace icn::circuit
