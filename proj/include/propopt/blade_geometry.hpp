#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "propopt/spline.hpp"

namespace propopt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Value of a section distribution at a chord fraction in [0, 1].
struct ProfilePoint {
  double chord_fraction = 0.0;
  double value = 0.0;
};

/// One cylindrical blade section. Camber and thickness are absolute lengths
/// tabulated at chord fractions; thickness is measured normal to the camber
/// line (American convention).
struct SectionDefinition {
  double radius_fraction = 0.0;
  double pitch = 0.0;
  double chord = 0.0;
  std::vector<ProfilePoint> camber;
  std::vector<ProfilePoint> thickness;
  double rake = 0.0;
  double skew = 0.0;

  void validate() const;
};

struct BladeDefinition {
  double hub_radius = 0.0;
  double tip_radius = 0.0;
  int n_blades = 6;
  std::vector<SectionDefinition> sections;  // increasing radius_fraction

  double diameter() const { return 2.0 * tip_radius; }
  void validate() const;
};

/// Multiplicative deformation factors applied to the baseline blade.
struct DeformationParams {
  double pitch = 1.0;
  double camber = 1.0;
  double chord = 1.0;
  double thickness = 1.0;

  std::array<double, 4> to_array() const { return {pitch, camber, chord, thickness}; }
  static DeformationParams from_array(std::span<const double> a);
  static DeformationParams identity() { return {}; }

  bool operator==(const DeformationParams&) const = default;
};

DeformationParams operator*(const DeformationParams& a, const DeformationParams& b);

/// Axis-aligned box in parameter space.
struct ParameterBox {
  std::array<double, 4> lower{0.9, 0.8, 0.7, 0.7};
  std::array<double, 4> upper{1.1, 1.2, 1.3, 1.3};

  /// pitch [0.9,1.1], camber [0.8,1.2], chord [0.7,1.3], thickness [0.7,1.3]
  static ParameterBox standard() { return {}; }

  bool contains(const DeformationParams& mu, double tol = 0.0) const;
  DeformationParams clip(const DeformationParams& mu) const;
  DeformationParams center() const;
  /// Affine map of each component onto [0, 1].
  std::array<double, 4> to_unit(const DeformationParams& mu) const;
  DeformationParams from_unit(std::span<const double> unit) const;
};

/// Synthetic six-bladed baseline: R = 0.5 m, r0/R = 0.2, seven sections,
/// constant pitch 1.0 D, chord 0.25 D (1.1 - r/R), parabolic camber (2 %
/// chord at mid-chord) and thickness (6 % chord at 30 % chord).
BladeDefinition synthetic_baseline_blade();

/// Multiply pitch, camber heights, chord and thicknesses by the factors.
/// Throws InvalidParameter for non-finite or non-positive factors. When
/// `box` is given the factors must also lie inside it.
BladeDefinition deform_blade(const BladeDefinition& blade, const DeformationParams& mu,
                             const ParameterBox* box = nullptr);

/// Chordwise section geometry in the section plane: x runs along the chord
/// from the leading edge (0) to the trailing edge (chord), y points toward
/// the back (suction side).
class SectionShape {
 public:
  explicit SectionShape(const SectionDefinition& section);

  double chord() const { return chord_; }
  double camber(double u) const { return camber_(u); }
  double thickness(double u) const;
  /// side = +1 face (pressure side, lower), -1 back (suction side, upper).
  Vec2 point(double u, int side) const;
  /// d point / du, analytic.
  Vec2 point_du(double u, int side) const;

 private:
  double chord_;
  CubicSpline camber_;     // camber height vs chord fraction
  CubicSpline thickness_;  // thickness vs chord fraction
};

struct SectionProfile {
  std::vector<Vec2> upper;  // back, leading -> trailing edge
  std::vector<Vec2> lower;  // face, leading -> trailing edge
};

/// Closed 2D profile sampled at n_points uniform chord fractions per curve.
/// Throws InvalidGeometry if the interpolated thickness goes negative.
SectionProfile build_section_profile(const SectionDefinition& section, int n_points);

enum class Side : std::int8_t { face = 1, back = -1 };

/// Lofted blade: per face a map S(u, v) on [0,1]^2, u = chord fraction,
/// v = span fraction from root to tip. Blade b is blade 0 rotated by
/// 2 pi b / n_blades about the +z axis. Immutable after construction.
class BladeSurface {
 public:
  explicit BladeSurface(const BladeDefinition& blade);

  const BladeDefinition& definition() const { return blade_; }
  int n_blades() const { return blade_.n_blades; }
  std::span<const double> span_knots() const { return knots_; }
  double radius_at(double v) const;

  Vec3 evaluate(Side side, double u, double v, int blade = 0) const;
  Vec3 derivative_u(Side side, double u, double v, int blade = 0) const;
  Vec3 derivative_v(Side side, double u, double v, int blade = 0) const;
  /// Outward area-weighted normal: +-(S_u x S_v) oriented away from the
  /// blade interior.
  Vec3 normal(Side side, double u, double v, int blade = 0) const;

  /// Evaluate position and derivatives along one u column at many v values,
  /// sharing the spanwise spline solve.
  struct ColumnSample {
    std::vector<Vec3> position, du, dv;
  };
  ColumnSample evaluate_column(Side side, double u, std::span<const double> v,
                               int blade = 0) const;

  /// The section point of section k at chord fraction u, in 3D.
  Vec3 section_point(std::size_t k, Side side, double u, int blade = 0) const;

 private:
  struct Cylindrical {
    double theta, z;
  };
  Cylindrical section_cyl(std::size_t k, int side, double u) const;
  Cylindrical section_cyl_du(std::size_t k, int side, double u) const;
  void check_orientation() const;

  BladeDefinition blade_;
  std::vector<SectionShape> shapes_;
  std::vector<double> knots_;    // span fraction of each section
  std::vector<double> radii_;    // absolute radius of each section
  std::vector<double> cos_phi_;  // pitch angle per section
  std::vector<double> sin_phi_;
};

/// Points on the blade faces with the attributes the field oracle needs.
/// Ordering: face then back, blade 0..n_blades-1, v-major then u.
struct SurfaceGrid {
  int n_u = 0;
  int n_v = 0;
  int n_blades = 0;
  std::vector<double> u, v;
  std::vector<std::int8_t> side;    // +1 face, -1 back
  std::vector<Vec3> position;
  std::vector<Vec3> normal;         // outward, area-weighted (|N| = area Jacobian)
  std::vector<Vec3> chord_tangent;  // unit, trailing edge -> leading edge
  std::vector<double> weight;       // tensor Gauss weights; empty for lattices

  std::size_t size() const { return position.size(); }
  std::size_t patch_size() const { return static_cast<std::size_t>(n_u) * n_v; }
  std::size_t index(Side s, int blade, int j, int i) const;
};

using QuadratureGrid = SurfaceGrid;

/// Tensor Gauss–Legendre nodes on every face of every blade.
QuadratureGrid gauss_quadrature_grid(const BladeSurface& surface, int n_u, int n_v);

/// Uniform UV lattice (corners included) on every face of every blade.
SurfaceGrid sample_surface(const BladeSurface& surface, int n_u, int n_v);

/// n points around the root section curve of one blade, on r = r0.
std::vector<Vec3> root_points(const BladeDefinition& blade, int n, int blade_index = 0);

/// Root points of every blade, concatenated blade by blade.
std::vector<Vec3> root_points_all_blades(const BladeDefinition& blade, int n);

/// Sum of weight * |normal| over the nodes of one side (all blades).
double quadrature_area(const QuadratureGrid& grid, Side side);

}  // namespace propopt
