#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "propopt/blade_geometry.hpp"
#include "propopt/snapshot_oracle.hpp"

namespace propopt {

/// Two triangles per lattice quad, wound so that normals follow the
/// orientation of the lattice's outward normal.
struct TriangulatedSurface {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<Vec3> centroid;
  std::vector<Vec3> unit_normal;
  std::vector<double> area;
  std::size_t degenerate = 0;  // zero-area triangles dropped from the lists

  std::size_t size() const { return triangles.size(); }
  double total_area() const;
};

/// Triangulate one structured n_u x n_v lattice stored u-fastest. Normals
/// follow (dP/du x dP/dv), reversed when `flip` is set.
TriangulatedSurface triangulate(std::span<const Vec3> lattice, int n_u, int n_v, bool flip = false);

/// Triangulate every patch of a lattice grid with outward normals on both
/// faces (face patches are wound in reverse).
TriangulatedSurface triangulate(const SurfaceGrid& lattice);

/// Average per-vertex values onto triangle centroids.
std::vector<double> to_centroids(const TriangulatedSurface& tri, std::span<const double> vertex_values);
std::vector<Vec3> to_centroids(const TriangulatedSurface& tri, std::span<const Vec3> vertex_values);

/// Density-scaled integrals T = rho sum (p n + tau) a, Q = rho sum (p n + tau) x r a.
struct ForcePrimitives {
  Vec3 thrust = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

ForcePrimitives forces_standard(const TriangulatedSurface& tri, std::span<const double> pressure,
                                std::span<const Vec3> traction, double density);

/// Gauss-node sums with area-weighted normals N (|N| = area Jacobian):
/// T = rho sum w (p N + |N| tau), Q = rho sum w (p N + |N| tau) x x.
ForcePrimitives forces_fast(std::span<const Vec3> positions, std::span<const double> weights,
                            std::span<const Vec3> area_normals, std::span<const double> pressure,
                            std::span<const Vec3> traction, double density);

struct Coefficients {
  double kt = 0.0;
  double kq = 0.0;
  double eta = 0.0;
};

/// kT = T/(rho n^2 D^4), kQ = Q/(rho n^2 D^5), eta = (T/Q) u0/(2 pi n).
/// Throws InvalidPhysics when Q_ax is zero.
Coefficients coefficients_and_efficiency(double thrust_axial, double torque_axial, double density,
                                         double revolutions, double diameter, double inflow_speed);

struct ForceResult {
  Vec3 thrust = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double thrust_axial = 0.0;
  double torque_axial = 0.0;
  double kt = 0.0;
  double kq = 0.0;
  double eta = 0.0;
};

/// Propeller axis of the blade frame. The inflow travels along +z, so with
/// outward normals both axial thrust and torque are positive for a loaded
/// propeller.
inline const Vec3 kPropellerAxis{0.0, 0.0, 1.0};

ForceResult make_force_result(const ForcePrimitives& prims, const OperatingPoint& op,
                              const Vec3& axis = kPropellerAxis);

}  // namespace propopt
