// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/magnetics.hpp"
#include "icn/quadrature.hpp"
#include "parallel.hpp"

namespace icn::magnetics {
namespace {

constexpr double kMu0Over4Pi = 1e-7;

// Integral over t in [0, l] of 1 / |x - (q0 + t u)|, in cancellation-free form.
inline double line_potential(const Vec3& x, const Vec3& q0, const Vec3& q1, const Vec3& u, double l) {
    const Vec3 d = x - q0;
    const double proj = d.dot(u);
    const double rho2 = (d - proj * u).squaredNorm();
    const double r0 = d.norm();
    const double r1 = (x - q1).norm();
    const double ahead = l - proj;
    if (ahead < 0.0) return std::log((r0 + proj) / (r1 - ahead));
    if (proj <= 0.0) return std::log((r1 + ahead) / (r0 - proj));
    return std::log((r1 + ahead) * (r0 + proj) / rho2);
}

// Same integral with the kernel 1 / sqrt(|x - q|^2 + g^2).
inline double line_potential_reg(const Vec3& x, const Vec3& q0, const Vec3& u, double l, double g2) {
    const Vec3 d = x - q0;
    const double proj = d.dot(u);
    const double w = std::sqrt((d - proj * u).squaredNorm() + g2);
    return std::asinh((l - proj) / w) + std::asinh(proj / w);
}

// Two segments joined head to tail (a ends where b starts); cos_e = u_a . u_b.
inline double corner_mutual(double la, double lb, double far, double cos_e) {
    return kMu0Over4Pi * 2.0 * cos_e * (la * std::atanh(lb / (la + far)) + lb * std::atanh(la / (lb + far)));
}

// Lexicographic ordering so that (a, b) and (b, a) are evaluated identically.
bool canonical_first(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    for (int k = 0; k < 3; ++k) {
        if (p0[k] != q0[k]) return p0[k] < q0[k];
    }
    for (int k = 0; k < 3; ++k) {
        if (p1[k] != q1[k]) return p1[k] < q1[k];
    }
    return true;
}

}  // namespace

double straight_self_term(double length, double g) {
    const double x = g / length;
    return 2.0 * kMu0Over4Pi * length * (std::asinh(1.0 / x) - std::sqrt(1.0 + x * x) + x);
}

double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    const double c = d1.dot(r), b = d1.dot(d2);
    const double denom = a * e - b * b;
    s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    t = (b * s + f) / e;
    if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double segment_mutual(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1, int refinement) {
    double la = (p1 - p0).norm(), lb = (q1 - q0).norm();
    if (!(la > 0.0) || !(lb > 0.0)) throw GeometryError("segment_mutual: zero-length segment");
    const Vec3 ua = (p1 - p0) / la, ub = (q1 - q0) / lb;
    const double dot = ua.dot(ub);
    if (std::abs(dot) < 1e-14) return 0.0;

    const double tol = 1e-9 * std::max(la, lb);
    if ((p1 - q0).norm() < tol) return corner_mutual(la, lb, (p0 - q1).norm(), dot);
    if ((q1 - p0).norm() < tol) return corner_mutual(lb, la, (q0 - p1).norm(), dot);
    if ((p1 - q1).norm() < tol) return -corner_mutual(la, lb, (p0 - q0).norm(), -dot);
    if ((p0 - q0).norm() < tol) return -corner_mutual(la, lb, (p1 - q1).norm(), -dot);

    // Outer quadrature runs over the shorter segment; ties broken canonically.
    const Vec3 *a0 = &p0, *a1 = &p1, *b0 = &q0, *b1 = &q1;
    const Vec3 *ua_p = &ua, *ub_p = &ub;
    if (lb < la || (lb == la && !canonical_first(p0, p1, q0, q1))) {
        std::swap(a0, b0);
        std::swap(a1, b1);
        std::swap(la, lb);
        std::swap(ua_p, ub_p);
    }
    const double dist = segment_distance(*a0, *a1, *b0, *b1);
    if (dist < 1e-12 * lb) throw GeometryError("segment_mutual: intersecting segments");

    const double ratio = dist / la;
    int order, panels = 1;
    if (ratio >= 10.0) order = 2;
    else if (ratio >= 4.0) order = 4;
    else if (ratio >= 1.5) order = 6;
    else if (ratio >= 0.6) order = 10;
    else {
        order = 10;
        panels = std::min(512, static_cast<int>(std::ceil(0.6 / ratio)));
    }
    panels *= std::max(1, refinement);
    order = std::min(quadrature::kMaxOrder, order);
    const auto& rule = quadrature::gauss_legendre(order);
    const double h = la / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        double part = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const Vec3 x = *a0 + (mid + 0.5 * h * rule.nodes[i]) * *ua_p;
            part += rule.weights[i] * line_potential(x, *b0, *b1, *ub_p, lb);
        }
        sum += part * 0.5 * h;
    }
    return kMu0Over4Pi * dot * sum;
}

namespace {

// Mutual of two pieces of the same wire with GMD-regularized kernel; g is the effective radius.
double segment_mutual_reg(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1, double g, int refinement) {
    double la = (p1 - p0).norm(), lb = (q1 - q0).norm();
    const Vec3 ua = (p1 - p0) / la, ub = (q1 - q0) / lb;
    const double dot = ua.dot(ub);
    if (std::abs(dot) < 1e-14) return 0.0;
    const Vec3 *a0 = &p0, *b0 = &q0;
    const Vec3 *ua_p = &ua, *ub_p = &ub;
    if (lb < la || (lb == la && !canonical_first(p0, p1, q0, q1))) {
        std::swap(a0, b0);
        std::swap(la, lb);
        std::swap(ua_p, ub_p);
    }
    const double dist = std::hypot(segment_distance(*a0, *a0 + la * *ua_p, *b0, *b0 + lb * *ub_p), g);
    const double ratio = dist / la;
    int order = 10, panels = 1;
    if (ratio >= 4.0) order = 4;
    else if (ratio >= 1.5) order = 6;
    else if (ratio < 0.6) panels = std::min(512, static_cast<int>(std::ceil(0.6 / ratio)));
    panels *= std::max(1, refinement);
    const auto& rule = quadrature::gauss_legendre(order);
    const double h = la / panels, g2 = g * g;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        double part = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const Vec3 x = *a0 + (mid + 0.5 * h * rule.nodes[i]) * *ua_p;
            part += rule.weights[i] * line_potential_reg(x, *b0, *ub_p, lb, g2);
        }
        sum += part * 0.5 * h;
    }
    return kMu0Over4Pi * dot * sum;
}

// Pairs of the same wire closer than this many effective radii (measured along the wire)
// use the regularized kernel; farther pairs use the thin-filament kernel.
constexpr double kLocalSpan = 30.0;

}  // namespace

double Filament::length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) s += (points[i] - points[i - 1]).norm();
    return s;
}

namespace {

double filament_pair_sum(const Filament& a, const Filament& b, const SolverOptions& opt) {
    const std::size_t na = a.segment_count();
    auto rows = detail::parallel_map<double>(na, opt.threads, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j)
            s += segment_mutual(a.points[i], a.points[i + 1], b.points[j], b.points[j + 1], opt.refinement);
        return s;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

double filament_self_sum(const Filament& a, double wire_radius, const SolverOptions& opt) {
    if (!(wire_radius > 0.0)) throw DomainError("self_inductance: wire radius must be positive");
    const double g = opt.gmd_factor * wire_radius;
    const std::size_t n = a.segment_count();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + (a.points[i + 1] - a.points[i]).norm();
    const double wire_len = cum[n];
    const double local = kLocalSpan * g;
    auto rows = detail::parallel_map<double>(n, opt.threads, [&](std::size_t i) {
        double s = straight_self_term(cum[i + 1] - cum[i], g);
        for (std::size_t j = i + 1; j < n; ++j) {
            double gap = cum[j] - cum[i + 1];
            if (a.closed) gap = std::min(gap, wire_len - cum[j + 1] + cum[i]);
            const auto &p0 = a.points[i], &p1 = a.points[i + 1], &q0 = a.points[j], &q1 = a.points[j + 1];
            s += 2.0 * (gap < local ? segment_mutual_reg(p0, p1, q0, q1, g, opt.refinement)
                                    : segment_mutual(p0, p1, q0, q1, opt.refinement));
        }
        return s;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

void check_filament(const Filament& f) {
    if (f.points.size() < 2) throw GeometryError("filament needs at least 2 points");
    for (std::size_t i = 1; i < f.points.size(); ++i)
        if ((f.points[i] - f.points[i - 1]).norm() == 0.0) throw GeometryError("filament has repeated points");
}

}  // namespace

template <class F>
double with_convergence_check(F&& eval, const SolverOptions& opt) {
    const double v = eval(opt);
    if (!opt.verify_convergence) return v;
    SolverOptions fine = opt;
    fine.refinement = 2 * std::max(1, opt.refinement);
    const double w = eval(fine);
    if (std::abs(w - v) > opt.convergence_tol * std::max(std::abs(w), 1e-300))
        throw AccuracyError("inductance quadrature did not converge between refinement levels");
    return w;
}

double neumann_mutual(const Filament& a, const Filament& b, const SolverOptions& opt) {
    check_filament(a);
    check_filament(b);
    return with_convergence_check([&](const SolverOptions& o) { return filament_pair_sum(a, b, o); }, opt);
}

double self_inductance(const Filament& a, std::optional<double> wire_radius, const SolverOptions& opt) {
    check_filament(a);
    const double rw = wire_radius.value_or(a.wire_radius);
    return with_convergence_check([&](const SolverOptions& o) { return filament_self_sum(a, rw, o); }, opt);
}

double series_inductance(const std::vector<const Filament*>& fs, const SolverOptions& opt) {
    double s = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        s += self_inductance(*fs[i], std::nullopt, opt);
        for (std::size_t j = i + 1; j < fs.size(); ++j) s += 2.0 * neumann_mutual(*fs[i], *fs[j], opt);
    }
    return s;
}

double group_mutual(const std::vector<const Filament*>& a, const std::vector<const Filament*>& b,
                    const SolverOptions& opt) {
    double s = 0.0;
    for (const auto* fa : a)
        for (const auto* fb : b) s += neumann_mutual(*fa, *fb, opt);
    return s;
}

}  // namespace icn::magnetics
