// SPDX-License-Identifier: Apache-2.0
#include "icn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "icn/errors.hpp"
#include "icn/format.hpp"

namespace icn::io {

StrictObject::StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object");
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key); }

const json& StrictObject::get(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError(path(key) + ": required field missing");
    used_.insert(key);
    return j_.at(key);
}

double StrictObject::number(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key) + ": not finite");
    return d;
}

double StrictObject::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int StrictObject::integer(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
    return v.get<int>();
}

int StrictObject::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool StrictObject::boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = get(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
}

std::string StrictObject::string(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
}

std::string StrictObject::string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
}

std::vector<double> StrictObject::numbers(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(path(key) + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

const json& StrictObject::raw(const std::string& key) const { return get(key); }

StrictObject StrictObject::object(const std::string& key) const { return StrictObject(get(key), path(key)); }

void StrictObject::finish() const {
    std::string unknown;
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!used_.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + path(it.key());
    if (!unknown.empty()) throw ConfigError("unknown key(s): " + unknown);
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {
json rounded(const json& j) {
    if (j.is_number_float()) return format::round9(j.get<double>());
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto& v : out) v = rounded(v);
        return out;
    }
    return j;
}
}  // namespace

std::string dump(const json& j) { return rounded(j).dump(2) + "\n"; }

void atomic_write(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, p);
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

json geometry_to_json(const magnetics::WindingGeometry& g) {
    json fs = json::array();
    for (const auto& f : g.filaments) {
        json pts = json::array();
        for (const auto& p : f.points) pts.push_back({p.x(), p.y(), p.z()});
        fs.push_back({{"role", magnetics::to_string(f.role)},
                      {"wire_radius_m", f.wire_radius},
                      {"closed", f.closed},
                      {"lead_segments_start", f.lead_segments_start},
                      {"lead_segments_end", f.lead_segments_end},
                      {"points_m", pts}});
    }
    return {{"filaments", fs}};
}

magnetics::WindingGeometry geometry_from_json(const json& j) {
    StrictObject root(j, "geometry");
    const auto& fs = root.raw("filaments");
    if (!fs.is_array()) throw ConfigError("geometry.filaments: expected an array");
    magnetics::WindingGeometry g;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        StrictObject o(fs[i], "geometry.filaments[" + std::to_string(i) + "]");
        magnetics::Filament f;
        try {
            f.role = magnetics::role_from_string(o.string("role"));
        } catch (const DomainError& e) {
            throw ConfigError(o.path("role") + ": " + e.what());
        }
        f.wire_radius = o.number("wire_radius_m");
        f.closed = o.boolean("closed", true);
        f.lead_segments_start = static_cast<std::size_t>(o.integer("lead_segments_start", 0));
        f.lead_segments_end = static_cast<std::size_t>(o.integer("lead_segments_end", 0));
        const auto& pts = o.raw("points_m");
        if (!pts.is_array()) throw ConfigError(o.path("points_m") + ": expected an array of [x, y, z]");
        for (const auto& p : pts) {
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
                throw ConfigError(o.path("points_m") + ": expected [x, y, z] triples");
            f.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        }
        o.finish();
        g.filaments.push_back(std::move(f));
    }
    root.finish();
    g.validate();
    return g;
}

json netlist_to_json(const circuit::Netlist& n) {
    json es = json::array();
    for (const auto& e : n.elements()) {
        json o = {{"kind", circuit::to_string(e.kind)}, {"name", e.name}, {"a", e.a}, {"b", e.b}, {"value", e.value}};
        if (e.series_r != 0.0) o["series_r_ohm"] = e.series_r;
        if (e.kind == circuit::ElementKind::voltage_source) {
            o["phase_rad"] = e.phase;
            o["frequency_Hz"] = e.frequency;
        }
        es.push_back(o);
    }
    json out = {{"nodes", n.nodes()}, {"elements", es}};
    if (!n.ground().empty()) out["ground"] = n.ground();
    return out;
}

circuit::Netlist netlist_from_json(const json& j) {
    StrictObject root(j, "netlist");
    circuit::Netlist n;
    if (root.has("nodes"))
        for (const auto& s : root.raw("nodes")) {
            if (!s.is_string()) throw ConfigError("netlist.nodes: expected strings");
            n.add_node(s.get<std::string>());
        }
    const auto& es = root.raw("elements");
    if (!es.is_array()) throw ConfigError("netlist.elements: expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
        StrictObject o(es[i], "netlist.elements[" + std::to_string(i) + "]");
        circuit::Element e;
        try {
            e.kind = circuit::element_kind_from_string(o.string("kind"));
        } catch (const DomainError& ex) {
            throw ConfigError(o.path("kind") + ": " + ex.what());
        }
        e.name = o.string("name");
        e.a = o.string("a");
        e.b = o.string("b");
        const bool probe = e.kind == circuit::ElementKind::current_probe || e.kind == circuit::ElementKind::voltage_probe;
        e.value = probe ? o.number("value", 0.0) : o.number("value");
        e.series_r = o.number("series_r_ohm", 0.0);
        e.phase = o.number("phase_rad", 0.0);
        e.frequency = o.number("frequency_Hz", 0.0);
        o.finish();
        n.add(e);
    }
    if (root.has("ground")) n.set_ground(root.string("ground"));
    root.finish();
    return n;
}

json two_port_to_json(const magnetics::TwoPortParams& p) {
    return {{"L1_H", p.L1}, {"L2_H", p.L2}, {"M_H", p.M}, {"R1_ohm", p.R1}, {"R2_ohm", p.R2}, {"f_Hz", p.f}};
}

}  // namespace icn::io
