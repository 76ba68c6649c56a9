// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace icn::geometry {

enum class ProfileKind { circular, d_shape };

struct ProfilePoint {
    double r;
    double z;
};

/// Toroid cross-section in the (r, z) half-plane.
///
/// Points run clockwise starting at the top of the inner edge; the polygon closes
/// implicitly from the last point back to the first.
struct CrossSectionProfile {
    ProfileKind kind = ProfileKind::circular;
    std::vector<ProfilePoint> points;
    double r_i = 0.0;
    double r_o = 0.0;
    double perimeter = 0.0;
    double area = 0.0;
    /// Surface integral of 1/r over the cross-section (meters); the ideal toroid
    /// inductance is mu0 N^2 / (2 pi) times this.
    double flux_integral = 0.0;

    double height() const;
    double center_radius() const { return 0.5 * (r_i + r_o); }
};

struct ToroidSpec {
    CrossSectionProfile profile;
    double center_radius = 0.0;
    int turns = 0;
    double wire_diameter = 0.0;
    double wire_length = 0.0;

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

struct ToroidDesign {
    ToroidSpec spec;
    double inductance = 0.0;
};

/// Slope dz/dr of the upper half of the constant-tension D-shape.
double dshape_slope(double r, double r_i, double r_o);

/// D-shape profile with n_steps intervals per half.
CrossSectionProfile dshape_profile(double r_i, double r_o, int n_steps = 512);

/// D-shape with its z coordinates stretched so the total height equals `height`.
/// Used to fit the profile to a prescribed envelope.
CrossSectionProfile dshape_profile_scaled(double r_i, double r_o, double height, int n_steps = 512);

/// Circle of the given radius centered at (center_radius, 0).
CrossSectionProfile circular_profile(double center_radius, double radius, int n_points = 4096);

/// Area, perimeter and 1/r flux integral of the closed polygon through the points.
double polygon_area(const CrossSectionProfile& p);
double polygon_perimeter(const CrossSectionProfile& p);
double polygon_flux_integral(const CrossSectionProfile& p);

/// Thin-toroid formula mu0 N^2 A / (2 pi r_c).
double toroid_inductance_approx(const ToroidSpec& spec);

/// Exact ideal-field inductance of a toroid wound on `p`.
double toroid_inductance_ideal(const CrossSectionProfile& p, int turns);

/// Nearest integer, ties toward the larger value.
int round_turns(double n);

inline constexpr double kCircularTurnsCoefficient = 0.8165;
inline constexpr double kDshapeTurnsCoefficient = 0.565;
inline constexpr double kDshapeRatio = 5.3;

ToroidDesign optimal_circular_toroid(double l, double d);
ToroidDesign optimal_dshape_toroid(double l, double d);

/// Closed-form optimum inductances (coefficient forms in l/d).
double optimal_circular_inductance(double l, double d);
double optimal_dshape_inductance(double l, double d);

/// CSV with header `r_m,z_m`, 9 significant digits.
std::string profile_csv(const CrossSectionProfile& p);

}  // namespace icn::geometry
