// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/magnetics.hpp"
#include "parallel.hpp"

namespace icn::magnetics {

void TwoPortParams::validate() const {
    if (!(L1 > 0.0) || !(L2 > 0.0)) throw DomainError("two-port: L1 and L2 must be positive");
    if (!(R1 >= 0.0) || !(R2 >= 0.0)) throw DomainError("two-port: resistances must be non-negative");
    if (M * M > L1 * L2 * (1.0 + 1e-12)) throw DomainError("two-port: M^2 exceeds L1 L2");
}

namespace {

// True when segment j is segment 0 rotated by 2 pi j / n about z.
bool rotationally_symmetric(const std::vector<const Filament*>& segs) {
    const std::size_t n = segs.size();
    if (n < 2) return false;
    const double tol = 1e-9 * std::max(1e-3, segs[0]->points.front().norm());
    for (std::size_t j = 1; j < n; ++j) {
        if (segs[j]->points.size() != segs[0]->points.size()) return false;
        if (segs[j]->wire_radius != segs[0]->wire_radius) return false;
        const Filament rot = rotated_z(*segs[0], 2.0 * kPi * j / n);
        for (std::size_t i = 0; i < rot.points.size(); ++i)
            if ((rot.points[i] - segs[j]->points[i]).norm() > tol) return false;
    }
    return true;
}

Eigen::MatrixXd segment_inductances(const std::vector<const Filament*>& segs, const SolverOptions& opt) {
    const std::size_t n = segs.size();
    Eigen::MatrixXd L(n, n);
    if (rotationally_symmetric(segs)) {
        std::vector<double> c(n);
        c[0] = self_inductance(*segs[0], std::nullopt, opt);
        for (std::size_t j = 1; j <= n / 2; ++j) c[j] = c[n - j] = neumann_mutual(*segs[0], *segs[j], opt);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) L(i, j) = c[(j + n - i) % n];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            L(i, i) = self_inductance(*segs[i], std::nullopt, opt);
            for (std::size_t j = i + 1; j < n; ++j) L(i, j) = L(j, i) = neumann_mutual(*segs[i], *segs[j], opt);
        }
    }
    return L;
}

}  // namespace

SegmentMatrix segment_matrix(const WindingGeometry& primary, const WindingGeometry& secondary,
                             const SolverOptions& opt) {
    primary.validate();
    secondary.validate();
    auto segs = secondary.with_role(Role::secondary_segment);
    if (segs.empty()) throw StructuralError("secondary has no segments");
    std::vector<const Filament*> prim;
    for (const auto& f : primary.filaments)
        if (f.role == Role::primary || f.role == Role::return_wire) prim.push_back(&f);
    if (prim.empty()) throw StructuralError("primary has no filaments");

    const std::size_t n = segs.size();
    SegmentMatrix s;
    s.L = segment_inductances(segs, opt);
    s.m.resize(n);
    for (std::size_t j = 0; j < n; ++j) s.m(j) = group_mutual(prim, {segs[j]}, opt);
    s.L1_raw = series_inductance(prim, opt);
    return s;
}

double parallel_inductance(const WindingGeometry& secondary, const SolverOptions& opt) {
    secondary.validate();
    auto segs = secondary.with_role(Role::secondary_segment);
    if (segs.empty()) throw StructuralError("secondary has no segments");
    const std::size_t n = segs.size();
    const Eigen::MatrixXd L = segment_inductances(segs, opt);
    const Eigen::LLT<Eigen::MatrixXd> llt(L);
    if (llt.info() != Eigen::Success) throw StructuralError("segment inductance matrix is not positive definite");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    return 1.0 / ones.dot(llt.solve(ones));
}

TwoPortParams reduce_parallel(const SegmentMatrix& s, double f, double R1, double R2) {
    const Eigen::LLT<Eigen::MatrixXd> llt(s.L);
    if (llt.info() != Eigen::Success) throw StructuralError("segment inductance matrix is not positive definite");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.L.rows());
    const Eigen::VectorXd y1 = llt.solve(ones);
    const Eigen::VectorXd ym = llt.solve(s.m);
    const double b = ones.dot(y1);
    const double a = ones.dot(ym);
    if (!(b > 0.0) || !std::isfinite(b)) throw StructuralError("segment reduction is singular");
    TwoPortParams p;
    p.L2 = 1.0 / b;
    p.M = a / b;
    p.L1 = s.L1_raw - s.m.dot(ym) + a * a / b;
    p.R1 = R1;
    p.R2 = R2;
    p.f = f;
    p.validate();
    return p;
}

TwoPortParams two_port(const WindingGeometry& primary, const WindingGeometry& secondary, double f, double R1,
                       double R2, const SolverOptions& opt) {
    return reduce_parallel(segment_matrix(primary, secondary, opt), f, R1, R2);
}

CouplingSummary coupling_summary(const TwoPortParams& p) {
    p.validate();
    CouplingSummary c;
    c.k = p.M / std::sqrt(p.L1 * p.L2);
    c.K1 = p.M / p.L1;
    c.K2 = p.M / p.L2;
    c.n = std::sqrt(p.L1 / p.L2);
    return c;
}

TwoPortParams segmentation_scaling(const TwoPortParams& base, int n_s) {
    if (n_s < 1) throw DomainError("segmentation_scaling: n_s must be >= 1");
    const double n = n_s;
    TwoPortParams p = base;
    p.L2 = base.L2 / (n * n);
    p.R2 = base.R2 / (n * n);
    p.M = base.M / n;
    return p;
}

double ring_toroid_inductance(const geometry::CrossSectionProfile& profile, int turns, double wire_radius,
                              int segments_per_ring, const SolverOptions& opt) {
    if (turns < 1) throw DomainError("ring toroid: turns must be >= 1");
    const Filament ring0 = profile_ring(profile, 0.0, segments_per_ring, wire_radius);
    SolverOptions inner = opt;
    inner.threads = 1;
    const std::size_t half = static_cast<std::size_t>(turns / 2);
    auto terms = detail::parallel_map<double>(half, opt.threads, [&](std::size_t k) {
        const int j = static_cast<int>(k) + 1;
        const double m = neumann_mutual(ring0, rotated_z(ring0, 2.0 * kPi * j / turns), inner);
        return (2 * j == turns) ? m : 2.0 * m;
    });
    double sum = self_inductance(ring0, std::nullopt, opt);
    for (double t : terms) sum += t;
    return turns * sum;
}

}  // namespace icn::magnetics

namespace icn::magnetics {

ToroidalTransformer build_transformer(const ToroidalTransformerSpec& spec, const SolverOptions& opt) {
    ToroidalTransformer t;
    t.profile = spec.height > 0.0 ? geometry::dshape_profile_scaled(spec.r_i, spec.r_o, spec.height)
                                  : geometry::dshape_profile(spec.r_i, spec.r_o);
    SecondaryOptions so;
    so.wire_radius = spec.secondary_wire_radius;
    so.segments_per_turn = spec.segments_per_turn;
    so.plate_radius = spec.lead_length > 0.0 ? spec.r_i - spec.lead_length : 0.0;
    t.secondary =
        generate_secondary_toroid(t.profile, 0.0, spec.turns_per_segment, spec.segments, spec.layers, so);
    PrimaryOptions po;
    po.wire_radius = spec.primary_wire_radius;
    po.gap = spec.primary_gap;
    po.segments_per_turn = spec.segments_per_turn;
    t.primary = generate_primary(spec.primary_style, spec.primary_turns, t.secondary, t.profile, spec.return_wire,
                                 0.0, po);
    t.params = two_port(t.primary, t.secondary, spec.f, spec.R1, spec.R2, opt);
    return t;
}

ToroidalTransformerSpec icn1_spec() {
    ToroidalTransformerSpec s;
    s.segments = 4;
    s.turns_per_segment = 36;
    s.primary_turns = 12;
    s.f = 25699.0;
    s.R1 = 0.200;
    s.R2 = 0.0120;
    return s;
}

ToroidalTransformerSpec icn2_spec() {
    ToroidalTransformerSpec s;
    s.segments = 6;
    s.turns_per_segment = 24;
    s.primary_turns = 13;
    s.f = 26042.0;
    s.R1 = 0.200;
    s.R2 = 0.0055;
    return s;
}

}  // namespace icn::magnetics
