// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "icn/geometry.hpp"

namespace icn::magnetics {

using Vec3 = Eigen::Vector3d;

enum class Role { secondary_segment, primary, return_wire, decoupling_loop };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

/// Thin-wire polyline. Open filaments end at terminals (ideal plates or leads).
struct Filament {
    std::vector<Vec3> points;
    double wire_radius = 0.0;
    Role role = Role::primary;
    bool closed = true;
    /// Number of terminal lead segments at the start and end; leads are exempt from collision checks.
    std::size_t lead_segments_start = 0;
    std::size_t lead_segments_end = 0;

    std::size_t segment_count() const { return points.size() - 1; }
    double length() const;
};

struct WindingGeometry {
    std::vector<Filament> filaments;

    /// Throws GeometryError on degenerate filaments or bad closure.
    void validate() const;
    /// Largest distance of any point from the origin.
    double bounding_radius() const;
    std::vector<const Filament*> with_role(Role r) const;
};

struct TwoPortParams {
    double L1 = 0.0;
    double L2 = 0.0;
    double M = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double f = 0.0;

    void validate() const;
};

struct CouplingSummary {
    double k = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double n = 0.0;
};

/// Quadrature and regularization settings shared by all inductance routines.
struct SolverOptions {
    /// Effective self distance of a round wire, as a multiple of the wire radius.
    /// e^{-1/4} is the uniform-current value; 1 drops the internal inductance.
    double gmd_factor = 0.7788007830714049;
    /// Extra outer-quadrature refinement (1 = default).
    int refinement = 1;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// Re-evaluate mutuals at twice the refinement and throw AccuracyError when the
    /// two levels differ by more than `convergence_tol` (relative).
    bool verify_convergence = false;
    double convergence_tol = 1e-4;
};

// ---- filament construction -------------------------------------------------

/// Circle of `segments` straight pieces, counter-clockwise about `normal`.
Filament circular_loop(const Vec3& center, const Vec3& normal, double radius, int segments, double wire_radius,
                       Role role = Role::primary);

/// Rigid rotation of a filament about the z axis.
Filament rotated_z(const Filament& f, double angle);

// ---- inductance ------------------------------------------------------------

/// Mutual inductance between two distinct filaments (Neumann integral).
double neumann_mutual(const Filament& a, const Filament& b, const SolverOptions& opt = {});

/// Self inductance of a filament; the wire radius comes from the filament unless overridden.
double self_inductance(const Filament& a, std::optional<double> wire_radius = std::nullopt,
                       const SolverOptions& opt = {});

/// Inductance of filaments connected in series (sum of all self and mutual terms).
double series_inductance(const std::vector<const Filament*>& fs, const SolverOptions& opt = {});

/// Mutual between two series groups.
double group_mutual(const std::vector<const Filament*>& a, const std::vector<const Filament*>& b,
                    const SolverOptions& opt = {});

/// Partial self inductance of a straight round wire with effective radius g.
double straight_self_term(double length, double g);

/// Mutual between two straight segments [p0,p1] and [q0,q1].
double segment_mutual(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1, int refinement = 1);

// ---- winding generators ----------------------------------------------------

enum class AzimuthAdvance {
    uniform,   ///< azimuth grows linearly with arc length around the profile
    rim_step,  ///< azimuth advances only in a window around the outer rim
};

struct SecondaryOptions {
    int segments_per_turn = 64;
    double wire_radius = 0.5e-3;
    /// Radius of the distribution plates the leads run to; 0 means no leads.
    double plate_radius = 0.0;
    AzimuthAdvance advance = AzimuthAdvance::uniform;
    bool check_collisions = true;
};

WindingGeometry generate_secondary_toroid(const geometry::CrossSectionProfile& profile, double r_placement,
                                          int turns_per_segment, int segments, int layers = 1,
                                          const SecondaryOptions& opt = {});

enum class PrimaryStyle { sparse_helical_toroid, dense_localized };

struct PrimaryOptions {
    int segments_per_turn = 64;
    double wire_radius = 0.5e-3;
    /// Outward offset of the primary path from the host profile; 0 picks 3 * (sum of wire radii).
    double gap = 0.0;
    AzimuthAdvance advance = AzimuthAdvance::rim_step;
    /// Fraction of the perimeter over which rim_step advances.
    double rim_window = 0.1;
    /// Azimuthal pitch angle of the dense style; 0 picks 3 wire radii at the inner edge.
    double dense_pitch = 0.0;
    bool check_collisions = true;
};

/// Primary winding around a secondary host. `host_profile` is the secondary's cross-section.
WindingGeometry generate_primary(PrimaryStyle style, int turns, const WindingGeometry& host,
                                 const geometry::CrossSectionProfile& host_profile, bool with_return_wire,
                                 double return_radius = 0.0, const PrimaryOptions& opt = {});

/// Outward normal offset of a clockwise profile polygon.
geometry::CrossSectionProfile offset_profile(const geometry::CrossSectionProfile& p, double delta);

/// Throws GeometryError if any two non-adjacent segments are closer than the sum of their wire radii.
void check_collisions(const WindingGeometry& g);

/// Minimum distance between segments [p0,p1] and [q0,q1].
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

// ---- two-port --------------------------------------------------------------

struct SegmentMatrix {
    Eigen::MatrixXd L;   ///< segment inductance matrix
    Eigen::VectorXd m;   ///< primary-to-segment mutuals
    double L1_raw = 0;   ///< primary self inductance (series of primary + return wire)
};

SegmentMatrix segment_matrix(const WindingGeometry& primary, const WindingGeometry& secondary,
                             const SolverOptions& opt = {});

/// Reduce with all secondary segments in parallel between the same two nodes.
TwoPortParams reduce_parallel(const SegmentMatrix& s, double f, double R1, double R2);

/// Composite inductance of all secondary segments connected in parallel.
double parallel_inductance(const WindingGeometry& secondary, const SolverOptions& opt = {});

TwoPortParams two_port(const WindingGeometry& primary, const WindingGeometry& secondary, double f, double R1,
                       double R2, const SolverOptions& opt = {});

CouplingSummary coupling_summary(const TwoPortParams& p);

/// Predicted parameters when the secondary is cut into n_s parallel segments.
/// L2 and R2 scale by 1/n_s^2, M by 1/n_s, L1 is unchanged.
TwoPortParams segmentation_scaling(const TwoPortParams& base, int n_s);

// ---- ring toroids ----------------------------------------------------------

/// Inductance of `turns` closed profile rings evenly spaced in azimuth (series), using
/// rotational symmetry: L = N * sum_j M(ring_0, ring_j).
double ring_toroid_inductance(const geometry::CrossSectionProfile& profile, int turns, double wire_radius,
                              int segments_per_ring = 128, const SolverOptions& opt = {});

/// Closed profile ring in the meridional plane at azimuth phi.
Filament profile_ring(const geometry::CrossSectionProfile& profile, double phi, int segments, double wire_radius);

// ---- complete transformer -------------------------------------------------

/// D-shaped toroidal transformer: parallel-segment secondary plus toroidal primary.
struct ToroidalTransformerSpec {
    double r_i = 0.04;
    double r_o = 0.092;
    /// Total profile height; 0 keeps the natural D-shape height.
    double height = 0.086;
    int segments = 4;
    int turns_per_segment = 36;
    int layers = 3;
    int primary_turns = 12;
    PrimaryStyle primary_style = PrimaryStyle::sparse_helical_toroid;
    bool return_wire = true;
    double secondary_wire_radius = 1.3e-3;
    double primary_wire_radius = 0.8e-3;
    /// Center-to-center standoff of the primary path from the secondary shell.
    double primary_gap = 15e-3;
    /// Radial length of the segment leads running to the distribution plates.
    double lead_length = 6e-3;
    int segments_per_turn = 64;
    double f = 25699.0;
    double R1 = 0.0;
    double R2 = 0.0;
};

struct ToroidalTransformer {
    geometry::CrossSectionProfile profile;
    WindingGeometry secondary;
    WindingGeometry primary;
    TwoPortParams params;
};

ToroidalTransformer build_transformer(const ToroidalTransformerSpec& spec, const SolverOptions& opt = {});

/// Built hardware: 4 x 36 secondary, 12-turn primary at 25.699 kHz.
ToroidalTransformerSpec icn1_spec();
/// Built hardware: 6 x 24 secondary, 13-turn primary at 26.042 kHz.
ToroidalTransformerSpec icn2_spec();

// ---- fields ----------------------------------------------------------------

/// Current per role; the return wire carries the primary current.
struct RoleCurrents {
    double primary = 0.0;
    double secondary_segment = 0.0;
    double decoupling_loop = 0.0;
    double of(Role r) const;
};

std::vector<Vec3> field_at(const std::vector<Vec3>& points, const WindingGeometry& g, const RoleCurrents& currents);
std::vector<Vec3> field_at(const std::vector<Vec3>& points, const WindingGeometry& g,
                           const std::vector<double>& filament_currents);

/// Quasi-uniform spherical sample (Fibonacci lattice).
std::vector<Vec3> sphere_points(int n, double radius);

/// RMS |B| over 242 points on a sphere of twice the bounding radius.
double stray_field_metric(const WindingGeometry& g, const RoleCurrents& currents, int n_points = 242,
                          double radius_factor = 2.0);

/// CSV `x_m,y_m,z_m,Bx_T,By_T,Bz_T`.
std::string field_csv(const std::vector<Vec3>& points, const std::vector<Vec3>& field);

}  // namespace icn::magnetics
