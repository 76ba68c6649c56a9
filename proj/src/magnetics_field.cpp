// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"
#include "icn/magnetics.hpp"
#include "parallel.hpp"

namespace icn::magnetics {

double RoleCurrents::of(Role r) const {
    switch (r) {
        case Role::primary:
        case Role::return_wire: return primary;
        case Role::secondary_segment: return secondary_segment;
        case Role::decoupling_loop: return decoupling_loop;
    }
    return 0.0;
}

std::vector<Vec3> field_at(const std::vector<Vec3>& points, const WindingGeometry& g,
                           const std::vector<double>& filament_currents) {
    if (filament_currents.size() != g.filaments.size())
        throw DomainError("field_at: one current per filament required");
    return detail::parallel_map<Vec3>(points.size(), 0, [&](std::size_t k) {
        const Vec3& p = points[k];
        Vec3 b = Vec3::Zero();
        for (std::size_t fi = 0; fi < g.filaments.size(); ++fi) {
            const auto& f = g.filaments[fi];
            const double current = filament_currents[fi];
            for (std::size_t i = 0; i + 1 < f.points.size(); ++i) {
                const Vec3 r1 = f.points[i] - p, r2 = f.points[i + 1] - p;
                const Vec3 seg = r2 - r1;
                const double t = std::clamp(-r1.dot(seg) / seg.squaredNorm(), 0.0, 1.0);
                if ((r1 + t * seg).norm() <= f.wire_radius)
                    throw ProximityError("field_at: probe point lies within a wire");
                if (current == 0.0) continue;
                const double n1 = r1.norm(), n2 = r2.norm();
                const double denom = n1 * n2 * (n1 * n2 + r1.dot(r2));
                if (denom <= 0.0) continue;
                b += (1e-7 * current * (n1 + n2) / denom) * r1.cross(r2);
            }
        }
        return b;
    });
}

std::vector<Vec3> field_at(const std::vector<Vec3>& points, const WindingGeometry& g, const RoleCurrents& currents) {
    std::vector<double> c;
    for (const auto& f : g.filaments) c.push_back(currents.of(f.role));
    return field_at(points, g, c);
}

std::vector<Vec3> sphere_points(int n, double radius) {
    if (n < 1) throw DomainError("sphere_points: n must be >= 1");
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(1.0 - z * z);
        out.push_back(radius * Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z));
    }
    return out;
}

double stray_field_metric(const WindingGeometry& g, const RoleCurrents& currents, int n_points,
                          double radius_factor) {
    if (!(radius_factor > 1.0)) throw DomainError("stray_field_metric: probe sphere must enclose the winding");
    const auto pts = sphere_points(n_points, radius_factor * g.bounding_radius());
    const auto b = field_at(pts, g, currents);
    double s = 0.0;
    for (const auto& v : b) s += v.squaredNorm();
    return std::sqrt(s / n_points);
}

std::string field_csv(const std::vector<Vec3>& points, const std::vector<Vec3>& field) {
    if (points.size() != field.size()) throw DomainError("field_csv: size mismatch");
    std::ostringstream os;
    os << "x_m,y_m,z_m,Bx_T,By_T,Bz_T\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (int k = 0; k < 3; ++k) os << format::sci9(points[i][k]) << ',';
        for (int k = 0; k < 3; ++k) os << format::sci9(field[i][k]) << (k < 2 ? ',' : '\n');
    }
    return os.str();
}

}  // namespace icn::magnetics
