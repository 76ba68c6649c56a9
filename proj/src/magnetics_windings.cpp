// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/magnetics.hpp"

namespace icn::magnetics {

std::string to_string(Role r) {
    switch (r) {
        case Role::secondary_segment: return "secondary_segment";
        case Role::primary: return "primary";
        case Role::return_wire: return "return_wire";
        case Role::decoupling_loop: return "decoupling_loop";
    }
    return "primary";
}

Role role_from_string(const std::string& s) {
    for (Role r : {Role::secondary_segment, Role::primary, Role::return_wire, Role::decoupling_loop})
        if (to_string(r) == s) return r;
    throw DomainError("unknown filament role: " + s);
}

void WindingGeometry::validate() const {
    if (filaments.empty()) throw GeometryError("winding has no filaments");
    for (const auto& f : filaments) {
        if (f.points.size() < 2) throw GeometryError("filament needs at least 2 points");
        if (!(f.wire_radius > 0.0)) throw GeometryError("filament wire radius must be positive");
        for (std::size_t i = 1; i < f.points.size(); ++i) {
            if (!f.points[i].allFinite()) throw GeometryError("filament has non-finite points");
            if ((f.points[i] - f.points[i - 1]).norm() == 0.0) throw GeometryError("filament has repeated points");
        }
        if (f.closed && (f.points.front() - f.points.back()).norm() > 1e-12)
            throw GeometryError("closed filament does not end at its first point");
    }
}

double WindingGeometry::bounding_radius() const {
    double r = 0.0;
    for (const auto& f : filaments)
        for (const auto& p : f.points) r = std::max(r, p.norm());
    return r;
}

std::vector<const Filament*> WindingGeometry::with_role(Role r) const {
    std::vector<const Filament*> out;
    for (const auto& f : filaments)
        if (f.role == r) out.push_back(&f);
    return out;
}

Filament circular_loop(const Vec3& center, const Vec3& normal, double radius, int segments, double wire_radius,
                       Role role) {
    if (segments < 3) throw DomainError("circular_loop: need >= 3 segments");
    const Vec3 n = normal.normalized();
    Vec3 e1 = std::abs(n.z()) < 0.9 ? n.cross(Vec3::UnitZ()) : n.cross(Vec3::UnitX());
    e1.normalize();
    const Vec3 e2 = n.cross(e1);
    Filament f;
    f.wire_radius = wire_radius;
    f.role = role;
    f.closed = true;
    for (int k = 0; k < segments; ++k) {
        const double t = 2.0 * kPi * k / segments;
        f.points.push_back(center + radius * (std::cos(t) * e1 + std::sin(t) * e2));
    }
    f.points.push_back(f.points.front());
    return f;
}

Filament rotated_z(const Filament& f, double angle) {
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
    Filament out = f;
    for (auto& p : out.points) p = rot * p;
    if (f.closed) out.points.back() = out.points.front();
    return out;
}

geometry::CrossSectionProfile offset_profile(const geometry::CrossSectionProfile& p, double delta) {
    const auto& v = p.points;
    const std::size_t n = v.size();
    if (n < 3) throw DomainError("offset_profile: profile too small");
    geometry::CrossSectionProfile out;
    out.kind = p.kind;
    out.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = v[(i + n - 1) % n];
        const auto& b = v[(i + 1) % n];
        const double tr = b.r - a.r, tz = b.z - a.z;
        const double len = std::hypot(tr, tz);
        out.points[i] = {v[i].r - delta * tz / len, v[i].z + delta * tr / len};
    }
    out.r_i = out.r_o = out.points[0].r;
    for (const auto& q : out.points) {
        out.r_i = std::min(out.r_i, q.r);
        out.r_o = std::max(out.r_o, q.r);
    }
    if (!(out.r_i > 0.0)) throw DomainError("offset_profile: offset crosses the axis");
    out.area = geometry::polygon_area(out);
    out.perimeter = geometry::polygon_perimeter(out);
    out.flux_integral = geometry::polygon_flux_integral(out);
    return out;
}

namespace {

struct TurnPath {
    std::vector<geometry::ProfilePoint> pts;  // one turn, first point repeated only implicitly
    std::vector<double> frac;                 // arc-length fraction of each sample in [0, 1)
    std::vector<geometry::ProfilePoint> normal;  // outward unit normal at each sample
    std::size_t curve_end = 0;                // index of the last point of the open curve (closure edge starts here)
    double rim_frac = 0.0;                    // fraction at the outermost sample
    geometry::ProfilePoint end_point;         // where an open last turn stops
};

// Resample a closed profile into `m` pieces uniform in arc length on the open curve
// points[0..e] and on the closing stretch e..0 separately, so both corners are exact samples.
// For straight-closed profiles e is the last point; for smooth ones it is moved back until
// the closing stretch is about one sample long.
TurnPath resample(const geometry::CrossSectionProfile& p, int m) {
    auto v = p.points;
    const std::size_t n = v.size();
    v.push_back(v[0]);
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) cum[i] = cum[i - 1] + std::hypot(v[i].r - v[i - 1].r, v[i].z - v[i - 1].z);
    const double total = cum[n];
    std::size_t e = n - 1;
    while (e > n / 2 && total - cum[e] < total / m) --e;
    const double curve = cum[e];
    const double edge = total - curve;
    int me = static_cast<int>(std::lround(m * edge / total));
    me = std::clamp(me, 1, m - 3);
    const int mc = m - me;

    TurnPath t;
    auto unit_normal = [](double tr, double tz) {
        const double len = std::hypot(tr, tz);
        return geometry::ProfilePoint{-tz / len, tr / len};
    };
    auto dir = [&](std::size_t i) {  // unit tangent of polyline piece i -> i+1
        const double l = cum[i + 1] - cum[i];
        return geometry::ProfilePoint{(v[i + 1].r - v[i].r) / l, (v[i + 1].z - v[i].z) / l};
    };
    std::size_t seg = 1;
    auto sample = [&](double s) {
        while (seg < n && cum[seg] < s) ++seg;
        const double w = (s - cum[seg - 1]) / (cum[seg] - cum[seg - 1]);
        t.pts.push_back({v[seg - 1].r + w * (v[seg].r - v[seg - 1].r), v[seg - 1].z + w * (v[seg].z - v[seg - 1].z)});
        t.frac.push_back(s / total);
        const auto d = dir(seg - 1);
        t.normal.push_back(unit_normal(d.r, d.z));
    };
    for (int k = 0; k < mc; ++k) sample(curve * k / mc);
    t.pts.front() = v[0];
    {
        const auto a = dir(n - 1), b = dir(0);
        t.normal.front() = unit_normal(a.r + b.r, a.z + b.z);
    }
    t.curve_end = t.pts.size();
    seg = e + 1;
    for (int k = 0; k < me; ++k) sample(curve + edge * k / me);
    t.pts[t.curve_end] = v[e];
    {
        const auto a = dir(e - 1), b = dir(e);
        t.normal[t.curve_end] = unit_normal(a.r + b.r, a.z + b.z);
    }
    t.end_point = v[e];
    std::size_t irim = 0;
    for (std::size_t i = 0; i < t.pts.size(); ++i)
        if (t.pts[i].r > t.pts[irim].r) irim = i;
    t.rim_frac = t.frac[irim];
    return t;
}

double advance_weight(double s, AzimuthAdvance mode, double rim, double window) {
    if (mode == AzimuthAdvance::uniform) return s;
    const double lo = rim - 0.5 * window, hi = rim + 0.5 * window;
    if (s <= lo) return 0.0;
    if (s >= hi) return 1.0;
    return (s - lo) / (hi - lo);
}

Vec3 to_xyz(double r, double phi, double z) { return {r * std::cos(phi), r * std::sin(phi), z}; }

geometry::CrossSectionProfile shifted(const geometry::CrossSectionProfile& p, double dr) {
    if (dr == 0.0) return p;
    auto out = p;
    for (auto& q : out.points) q.r += dr;
    out.r_i += dr;
    out.r_o += dr;
    if (!(out.r_i > 0.0)) throw DomainError("placement puts the profile across the axis");
    out.flux_integral = geometry::polygon_flux_integral(out);
    return out;
}

}  // namespace

WindingGeometry generate_secondary_toroid(const geometry::CrossSectionProfile& profile, double r_placement,
                                          int turns_per_segment, int segments, int layers,
                                          const SecondaryOptions& opt) {
    if (segments < 1 || turns_per_segment < 1 || layers < 1)
        throw DomainError("secondary: segments, turns and layers must be >= 1");
    if (opt.segments_per_turn < 8) throw DomainError("secondary: need >= 8 segments per turn");
    if (!(opt.wire_radius > 0.0)) throw DomainError("secondary: wire radius must be positive");
    const auto prof = shifted(profile, r_placement > 0.0 ? r_placement - profile.r_i : 0.0);
    const TurnPath path = resample(prof, opt.segments_per_turn);

    const double span = 2.0 * kPi / segments;
    const double dphi = span / turns_per_segment;
    // Stacked layers sit on top of layer 0 (outward normal) wherever the turns are too
    // crowded to lie side by side, then blend back onto the base shell.
    const double layer_step = 2.1 * opt.wire_radius;
    const double r_fit = 1.05 * segments * turns_per_segment * 2.0 * opt.wire_radius / (2.0 * kPi);
    const double ramp = std::max(4.0 * layer_step, 0.15 * (prof.r_o - prof.r_i));
    auto layer_offset = [&](int layer, const geometry::ProfilePoint& q, const geometry::ProfilePoint& n) {
        if (layer == 0) return geometry::ProfilePoint{0.0, 0.0};
        const double x = (q.r - std::max(r_fit, prof.r_i)) / ramp;
        const double blend = x <= 0.0 ? 1.0 : x >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(kPi * x));
        const double d = layer * layer_step * blend;
        return geometry::ProfilePoint{d * n.r, d * n.z};
    };
    const bool closed = segments == 1 && opt.plate_radius <= 0.0;

    WindingGeometry g;
    for (int s = 0; s < segments; ++s) {
        Filament f;
        f.role = Role::secondary_segment;
        f.wire_radius = opt.wire_radius;
        f.closed = closed;
        const double phi0 = s * span;
        for (int k = 0; k < turns_per_segment; ++k) {
            const bool last = k + 1 == turns_per_segment;
            const std::size_t count = (last && !closed) ? path.curve_end : path.pts.size();
            for (std::size_t j = 0; j < count; ++j) {
                // switch to the next turn's layer at the outer rim, where the layers coincide
                const int layer = (k + (path.frac[j] < path.rim_frac ? 0 : 1)) % layers;
                const auto& q = path.pts[j];
                const double phi = phi0 + dphi * (k + advance_weight(path.frac[j], opt.advance, path.rim_frac, 0.1));
                const auto off = layer_offset(layer, q, path.normal[j]);
                f.points.push_back(to_xyz(q.r + off.r, phi, q.z + off.z));
            }
        }
        if (closed) {
            f.points.push_back(f.points.front());
        } else {
            // the open curve ends one sample short of the bottom corner; add it
            const auto& end = path.end_point;
            const int layer = turns_per_segment % layers;
            const double phi_end =
                phi0 + dphi * (turns_per_segment - 1 +
                               advance_weight(path.frac[path.curve_end], opt.advance, path.rim_frac, 0.1));
            const auto off = layer_offset(layer, end, path.normal[path.curve_end]);
            f.points.push_back(to_xyz(end.r + off.r, phi_end, end.z + off.z));
            if (opt.plate_radius > 0.0) {
                if (!(opt.plate_radius < prof.r_i)) throw DomainError("secondary: plate radius must be inside r_i");
                const Vec3 first = f.points.front();
                f.points.insert(f.points.begin(), to_xyz(opt.plate_radius, phi0, first.z()));
                f.points.push_back(to_xyz(opt.plate_radius, phi_end, f.points.back().z()));
                f.lead_segments_start = f.lead_segments_end = 1;
            }
        }
        g.filaments.push_back(std::move(f));
    }
    g.validate();
    if (opt.check_collisions) check_collisions(g);
    return g;
}

WindingGeometry generate_primary(PrimaryStyle style, int turns, const WindingGeometry& host,
                                 const geometry::CrossSectionProfile& host_profile, bool with_return_wire,
                                 double return_radius, const PrimaryOptions& opt) {
    if (turns < 1) throw DomainError("primary: turns must be >= 1");
    if (!(opt.wire_radius > 0.0)) throw DomainError("primary: wire radius must be positive");
    host.validate();
    double host_rw = 0.0;
    for (const auto& f : host.filaments) host_rw = std::max(host_rw, f.wire_radius);
    const double gap = opt.gap > 0.0 ? opt.gap : 3.0 * (host_rw + opt.wire_radius);
    const auto prof = offset_profile(host_profile, gap);
    const TurnPath path = resample(prof, opt.segments_per_turn);

    WindingGeometry g;
    Filament f;
    f.role = Role::primary;
    f.wire_radius = opt.wire_radius;
    double dphi;
    if (style == PrimaryStyle::sparse_helical_toroid) {
        dphi = 2.0 * kPi / turns;
        f.closed = true;
    } else {
        dphi = opt.dense_pitch > 0.0 ? opt.dense_pitch : 3.0 * opt.wire_radius / prof.r_i;
        f.closed = true;
        if (dphi * turns >= 2.0 * kPi) throw GeometryError("primary: dense pitch wraps the full circle");
    }
    for (int k = 0; k < turns; ++k) {
        for (std::size_t j = 0; j < path.pts.size(); ++j) {
            const auto& q = path.pts[j];
            const double phi = dphi * (k + advance_weight(path.frac[j], opt.advance, path.rim_frac, opt.rim_window));
            f.points.push_back(to_xyz(q.r, phi, q.z));
        }
    }
    if (style == PrimaryStyle::sparse_helical_toroid) {
        f.points.push_back(f.points.front());
    } else {
        // close through the axis side so the lead clears the turns
        const auto& c = path.pts.front();
        const double back = 3.0 * opt.wire_radius + gap;
        const double phi_end = dphi * turns;
        f.points.push_back(to_xyz(c.r, phi_end, c.z));
        f.points.push_back(to_xyz(c.r - back, phi_end, c.z));
        f.points.push_back(to_xyz(c.r - back, 0.0, c.z));
        f.points.push_back(f.points.front());
    }
    g.filaments.push_back(std::move(f));

    if (with_return_wire) {
        const double rr = return_radius > 0.0 ? return_radius : prof.r_o + gap;
        // Counter-current: clockwise about +z.
        Filament ret = circular_loop(Vec3::Zero(), -Vec3::UnitZ(), rr, std::max(128, 2 * opt.segments_per_turn),
                                     opt.wire_radius, Role::return_wire);
        g.filaments.push_back(std::move(ret));
    }
    g.validate();
    if (opt.check_collisions) {
        WindingGeometry all = host;
        all.filaments.insert(all.filaments.end(), g.filaments.begin(), g.filaments.end());
        check_collisions(all);
    }
    return g;
}

void check_collisions(const WindingGeometry& g) {
    struct Seg {
        std::size_t f, i;
        Vec3 a, b;
        double rw;
    };
    std::vector<Seg> segs;
    double cell = 0.0;
    for (std::size_t fi = 0; fi < g.filaments.size(); ++fi) {
        const auto& f = g.filaments[fi];
        for (std::size_t i = f.lead_segments_start; i + 1 + f.lead_segments_end < f.points.size(); ++i) {
            segs.push_back({fi, i, f.points[i], f.points[i + 1], f.wire_radius});
            cell = std::max(cell, (f.points[i + 1] - f.points[i]).norm() + 2.0 * f.wire_radius);
        }
    }
    if (segs.empty()) return;
    double rmax = 0.0;
    for (const auto& s : segs) rmax = std::max(rmax, s.rw);
    cell = std::max(cell, 4.0 * rmax);
    auto key = [cell](const Vec3& c, int dx, int dy, int dz) {
        const long long x = static_cast<long long>(std::floor(c.x() / cell)) + dx;
        const long long y = static_cast<long long>(std::floor(c.y() / cell)) + dy;
        const long long z = static_cast<long long>(std::floor(c.z() / cell)) + dz;
        return (x * 73856093LL) ^ (y * 19349663LL) ^ (z * 83492791LL);
    };
    std::unordered_map<long long, std::vector<std::size_t>> grid;
    for (std::size_t s = 0; s < segs.size(); ++s) grid[key(0.5 * (segs[s].a + segs[s].b), 0, 0, 0)].push_back(s);

    auto neighbours = [&](const Seg& p, const Seg& q) {
        if (p.f != q.f) return false;
        const auto& f = g.filaments[p.f];
        const std::size_t n = f.segment_count();
        std::size_t d = p.i > q.i ? p.i - q.i : q.i - p.i;
        if (f.closed) d = std::min(d, n - d);
        return d <= 2;
    };
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto& p = segs[s];
        const Vec3 c = 0.5 * (p.a + p.b);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = grid.find(key(c, dx, dy, dz));
                    if (it == grid.end()) continue;
                    for (std::size_t t : it->second) {
                        if (t <= s) continue;
                        const auto& q = segs[t];
                        if (neighbours(p, q)) continue;
                        const double d = segment_distance(p.a, p.b, q.a, q.b);
                        if (d < p.rw + q.rw) {
                            const Vec3 at = 0.5 * (p.a + p.b);
                            throw GeometryError(
                                "winding collision: filament " + std::to_string(p.f) + " segment " +
                                std::to_string(p.i) + " and filament " + std::to_string(q.f) + " segment " +
                                std::to_string(q.i) + " are " + std::to_string(d * 1e3) + " mm apart (limit " +
                                std::to_string((p.rw + q.rw) * 1e3) + " mm) near (" + std::to_string(at.x()) + ", " +
                                std::to_string(at.y()) + ", " + std::to_string(at.z()) + ") m");
                        }
                    }
                }
    }
}

}  // namespace icn::magnetics

namespace icn::magnetics {

Filament profile_ring(const geometry::CrossSectionProfile& profile, double phi, int segments, double wire_radius) {
    if (segments < 8) throw DomainError("profile_ring: need >= 8 segments");
    const TurnPath path = resample(profile, segments);
    Filament f;
    f.role = Role::secondary_segment;
    f.wire_radius = wire_radius;
    f.closed = true;
    for (const auto& q : path.pts) f.points.push_back(to_xyz(q.r, phi, q.z));
    f.points.push_back(f.points.front());
    return f;
}

}  // namespace icn::magnetics
