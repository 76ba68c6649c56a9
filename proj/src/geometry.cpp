// SPDX-License-Identifier: Apache-2.0
#include "icn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"
#include "icn/quadrature.hpp"

namespace icn::geometry {
namespace {

void check_radii(double r_i, double r_o) {
    if (!(std::isfinite(r_i) && std::isfinite(r_o)) || !(r_i > 0.0) || !(r_o > r_i))
        throw DomainError("radii must satisfy r_o > r_i > 0");
}

// The D-shape is integrated in theta, with r = r_i exp(a (1 - cos theta)) and
// a = ln(r_o / r_i) / 2. Under this map dz/dtheta = r_i a e^t cos(theta), which is smooth
// on [0, pi] even though dz/dr diverges at both ends.
CrossSectionProfile dshape_impl(double r_i, double r_o, int n, double zscale) {
    check_radii(r_i, r_o);
    if (n < 16) throw DomainError("dshape_profile: n_steps must be >= 16");

    const double a = 0.5 * std::log(r_o / r_i);
    const auto& hi = quadrature::gauss_legendre(8);
    const auto& lo = quadrature::gauss_legendre(4);
    const double s2 = zscale * zscale;

    auto t_of = [a](double th) { return a * (1.0 - std::cos(th)); };
    auto dz = [&](double th) { return r_i * a * std::exp(t_of(th)) * std::cos(th); };
    auto ds = [&](double th) {
        const double c = std::cos(th), s = std::sin(th);
        return r_i * a * std::exp(t_of(th)) * std::sqrt(s * s + s2 * c * c);
    };

    std::vector<double> cum(n + 1, 0.0);
    double err = 0.0, arc = 0.0, rdz = 0.0, tdz = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t0 = kPi * k / n, t1 = kPi * (k + 1) / n;
        const double i8 = quadrature::integrate(dz, t0, t1, hi);
        err += std::abs(i8 - quadrature::integrate(dz, t0, t1, lo));
        cum[k + 1] = cum[k] + i8;
        arc += quadrature::integrate(ds, t0, t1, hi);
        rdz += quadrature::integrate([&](double th) { return r_i * std::exp(t_of(th)) * dz(th); }, t0, t1, hi);
        tdz += quadrature::integrate([&](double th) { return t_of(th) * dz(th); }, t0, t1, hi);
    }
    const double z_i = -cum[n];
    const double z_peak = z_i + quadrature::integrate(dz, 0.0, 0.5 * kPi, quadrature::gauss_legendre(32));
    if (!(z_peak > 0.0) || err > 1e-6 * 2.0 * z_peak)
        throw AccuracyError("dshape_profile: quadrature error estimate exceeds 1e-6 of the height");

    CrossSectionProfile p;
    p.kind = ProfileKind::d_shape;
    p.r_i = r_i;
    p.r_o = r_o;
    p.points.reserve(2 * n + 1);
    for (int k = 0; k <= n; ++k) {
        const double r = (k == n) ? r_o : r_i * std::exp(t_of(kPi * k / n));
        const double z = (k == n) ? 0.0 : zscale * (z_i + cum[k]);
        p.points.push_back({k == 0 ? r_i : r, z});
    }
    for (int k = n - 1; k >= 0; --k) p.points.push_back({p.points[k].r, -p.points[k].z});

    p.perimeter = 2.0 * arc + 2.0 * zscale * z_i;
    p.area = zscale * 2.0 * (-r_i * z_i - rdz);
    p.flux_integral = zscale * (-2.0 * tdz);
    return p;
}

}  // namespace

double CrossSectionProfile::height() const {
    double lo = 0.0, hi = 0.0;
    for (const auto& pt : points) {
        lo = std::min(lo, pt.z);
        hi = std::max(hi, pt.z);
    }
    return hi - lo;
}

void ToroidSpec::validate() const {
    if (turns < 1) throw DomainError("toroid: turns must be >= 1");
    if (!(wire_diameter > 0.0)) throw DomainError("toroid: wire diameter must be positive");
    if (!(wire_length > 0.0)) throw DomainError("toroid: wire length must be positive");
    check_radii(profile.r_i, profile.r_o);
    if (std::abs(center_radius - profile.center_radius()) > 1e-12 * profile.r_o)
        throw DomainError("toroid: center radius must equal (r_i + r_o) / 2");
}

double dshape_slope(double r, double r_i, double r_o) {
    check_radii(r_i, r_o);
    if (!(r > r_i) || !(r < r_o)) throw DomainError("dshape_slope: r must lie strictly between r_i and r_o");
    const double num = std::log(std::sqrt(r_i * r_o) / r);
    return num / std::sqrt(std::log(r / r_i) * std::log(r_o / r));
}

CrossSectionProfile dshape_profile(double r_i, double r_o, int n_steps) {
    return dshape_impl(r_i, r_o, n_steps, 1.0);
}

CrossSectionProfile dshape_profile_scaled(double r_i, double r_o, double height, int n_steps) {
    if (!(height > 0.0)) throw DomainError("dshape_profile_scaled: height must be positive");
    const auto base = dshape_impl(r_i, r_o, n_steps, 1.0);
    return dshape_impl(r_i, r_o, n_steps, height / base.height());
}

CrossSectionProfile circular_profile(double center_radius, double radius, int n_points) {
    if (!(radius > 0.0) || !(center_radius > radius)) throw DomainError("circular_profile: need center_radius > radius > 0");
    if (n_points < 16 || n_points % 2) throw DomainError("circular_profile: n_points must be even and >= 16");
    CrossSectionProfile p;
    p.kind = ProfileKind::circular;
    p.r_i = center_radius - radius;
    p.r_o = center_radius + radius;
    const int half = n_points / 2;
    p.points.resize(n_points);
    for (int k = 0; k <= half; ++k) {
        const double phi = kPi - 2.0 * kPi * k / n_points;
        const double z = (k == 0 || k == half) ? 0.0 : radius * std::sin(phi);
        p.points[k] = {center_radius + radius * std::cos(phi), z};
        if (k > 0 && k < half) p.points[n_points - k] = {p.points[k].r, -z};
    }
    p.points[0].r = p.r_i;
    p.points[half].r = p.r_o;
    p.perimeter = polygon_perimeter(p);
    p.area = polygon_area(p);
    p.flux_integral = polygon_flux_integral(p);
    return p;
}

double polygon_area(const CrossSectionProfile& p) {
    const auto& v = p.points;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        s += a.r * b.z - b.r * a.z;
    }
    return 0.5 * std::abs(s);
}

double polygon_perimeter(const CrossSectionProfile& p) {
    const auto& v = p.points;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        s += std::hypot(b.r - a.r, b.z - a.z);
    }
    return s;
}

double polygon_flux_integral(const CrossSectionProfile& p) {
    // Green's theorem: the integral of 1/r over the region is the loop integral of ln(r) dz.
    const auto& v = p.points;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        const double dr = b.r - a.r;
        double mean_log;
        if (std::abs(dr) > 1e-6 * a.r) {
            auto F = [](double r) { return r * std::log(r) - r; };
            mean_log = (F(b.r) - F(a.r)) / dr;
        } else {
            mean_log = std::log(0.5 * (a.r + b.r));
        }
        s += mean_log * (b.z - a.z);
    }
    return std::abs(s);
}

double toroid_inductance_approx(const ToroidSpec& spec) {
    spec.validate();
    const double n = spec.turns;
    return kMu0 * n * n * spec.profile.area / (2.0 * kPi * spec.center_radius);
}

double toroid_inductance_ideal(const CrossSectionProfile& p, int turns) {
    if (turns < 1) throw DomainError("toroid: turns must be >= 1");
    const double n = turns;
    return kMu0 * n * n * p.flux_integral / (2.0 * kPi);
}

int round_turns(double n) {
    if (!std::isfinite(n) || n < 0.5) throw DomainError("round_turns: value out of range");
    // small slack so products like 0.565 * 100 still count as ties
    return static_cast<int>(std::floor(n + 0.5 + 1e-9));
}

double optimal_circular_inductance(double l, double d) {
    const double x = l / d;
    return kMu0 * d / (2.0 * kPi) * (0.2722 * std::pow(x, 1.5) + 0.25 * x);
}

double optimal_dshape_inductance(double l, double d) {
    const double x = l / d;
    return kMu0 * d / (2.0 * kPi) * (0.314 * std::pow(x, 1.5) + 0.25 * x);
}

namespace {
void check_many_turns(double l, double d) {
    if (!(d > 0.0) || !(l > 0.0) || !(l / d > 100.0)) throw DomainError("optimum formulas need l/d > 100");
}
}  // namespace

ToroidDesign optimal_circular_toroid(double l, double d) {
    check_many_turns(l, d);
    ToroidDesign out;
    auto& s = out.spec;
    s.turns = round_turns(kCircularTurnsCoefficient * std::sqrt(l / d));
    s.wire_diameter = d;
    const double r_i = s.turns * d / (2.0 * kPi);
    const double rho = l / (2.0 * kPi * s.turns);
    s.profile = circular_profile(r_i + rho, rho);
    s.center_radius = s.profile.center_radius();
    s.wire_length = s.turns * s.profile.perimeter;
    out.inductance = optimal_circular_inductance(l, d);
    return out;
}

ToroidDesign optimal_dshape_toroid(double l, double d) {
    check_many_turns(l, d);
    ToroidDesign out;
    auto& s = out.spec;
    s.turns = round_turns(kDshapeTurnsCoefficient * std::sqrt(l / d));
    s.wire_diameter = d;
    const double r_i = s.turns * d / (2.0 * kPi);
    s.profile = dshape_profile(r_i, kDshapeRatio * r_i);
    s.center_radius = s.profile.center_radius();
    s.wire_length = s.turns * s.profile.perimeter;
    out.inductance = optimal_dshape_inductance(l, d);
    return out;
}

std::string profile_csv(const CrossSectionProfile& p) {
    std::ostringstream os;
    os << "r_m,z_m\n";
    for (const auto& pt : p.points) os << format::sci9(pt.r) << ',' << format::sci9(pt.z) << '\n';
    return os.str();
}

}  // namespace icn::geometry
