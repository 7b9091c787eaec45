#include "propopt/hydro_forces.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "propopt/errors.hpp"

namespace propopt {

double TriangulatedSurface::total_area() const {
  double a = 0.0;
  for (double x : area) a += x;
  return a;
}

namespace {

void append_patch(TriangulatedSurface& tri, std::span<const Vec3> lattice, int n_u, int n_v, bool flip) {
  const auto base = static_cast<std::uint32_t>(tri.vertices.size());
  tri.vertices.insert(tri.vertices.end(), lattice.begin(), lattice.end());
  const auto id = [&](int i, int j) { return base + static_cast<std::uint32_t>(j * n_u + i); };
  const auto add = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (flip) std::swap(b, c);
    const Vec3& pa = tri.vertices[a];
    const Vec3 n = (tri.vertices[b] - pa).cross(tri.vertices[c] - pa);
    const double twice_area = n.norm();
    if (!(twice_area > 0.0)) {
      ++tri.degenerate;
      return;
    }
    tri.triangles.push_back({a, b, c});
    tri.centroid.push_back((pa + tri.vertices[b] + tri.vertices[c]) / 3.0);
    tri.unit_normal.push_back(n / twice_area);
    tri.area.push_back(0.5 * twice_area);
  };
  for (int j = 0; j + 1 < n_v; ++j) {
    for (int i = 0; i + 1 < n_u; ++i) {
      add(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      add(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
}

}  // namespace

TriangulatedSurface triangulate(std::span<const Vec3> lattice, int n_u, int n_v, bool flip) {
  if (n_u < 2 || n_v < 2) throw InvalidInput("triangulation needs a lattice of at least 2 x 2");
  if (lattice.size() != static_cast<std::size_t>(n_u) * n_v) {
    throw InvalidInput("lattice size differs from n_u * n_v");
  }
  TriangulatedSurface tri;
  append_patch(tri, lattice, n_u, n_v, flip);
  return tri;
}

TriangulatedSurface triangulate(const SurfaceGrid& lattice) {
  if (lattice.n_u < 2 || lattice.n_v < 2) throw InvalidInput("triangulation needs a lattice of at least 2 x 2");
  TriangulatedSurface tri;
  const std::size_t patch = lattice.patch_size();
  for (std::size_t start = 0; start < lattice.size(); start += patch) {
    // the face normal is -(S_u x S_v)
    const bool flip = lattice.side[start] == static_cast<std::int8_t>(Side::face);
    append_patch(tri, std::span<const Vec3>(lattice.position).subspan(start, patch), lattice.n_u,
                 lattice.n_v, flip);
  }
  return tri;
}

std::vector<double> to_centroids(const TriangulatedSurface& tri, std::span<const double> values) {
  if (values.size() != tri.vertices.size()) throw InvalidInput("vertex value count mismatch");
  std::vector<double> out(tri.size());
  for (std::size_t t = 0; t < tri.size(); ++t) {
    const auto& [a, b, c] = tri.triangles[t];
    out[t] = (values[a] + values[b] + values[c]) / 3.0;
  }
  return out;
}

std::vector<Vec3> to_centroids(const TriangulatedSurface& tri, std::span<const Vec3> values) {
  if (values.size() != tri.vertices.size()) throw InvalidInput("vertex value count mismatch");
  std::vector<Vec3> out(tri.size());
  for (std::size_t t = 0; t < tri.size(); ++t) {
    const auto& [a, b, c] = tri.triangles[t];
    out[t] = (values[a] + values[b] + values[c]) / 3.0;
  }
  return out;
}

ForcePrimitives forces_standard(const TriangulatedSurface& tri, std::span<const double> pressure,
                                std::span<const Vec3> traction, double density) {
  if (pressure.size() != tri.size() || traction.size() != tri.size()) {
    throw InvalidInput("field arrays must match the triangle count");
  }
  ForcePrimitives f;
  for (std::size_t c = 0; c < tri.size(); ++c) {
    const Vec3 load = (pressure[c] * tri.unit_normal[c] + traction[c]) * tri.area[c];
    f.thrust += load;
    f.torque += load.cross(tri.centroid[c]);
  }
  f.thrust *= density;
  f.torque *= density;
  return f;
}

ForcePrimitives forces_fast(std::span<const Vec3> positions, std::span<const double> weights,
                            std::span<const Vec3> area_normals, std::span<const double> pressure,
                            std::span<const Vec3> traction, double density) {
  const std::size_t n = positions.size();
  if (weights.size() != n || area_normals.size() != n || pressure.size() != n || traction.size() != n) {
    throw InvalidInput("quadrature arrays differ in length");
  }
  ForcePrimitives f;
  for (std::size_t q = 0; q < n; ++q) {
    const Vec3 load = weights[q] * (pressure[q] * area_normals[q] + area_normals[q].norm() * traction[q]);
    f.thrust += load;
    f.torque += load.cross(positions[q]);
  }
  f.thrust *= density;
  f.torque *= density;
  return f;
}

Coefficients coefficients_and_efficiency(double thrust_axial, double torque_axial, double density,
                                         double revolutions, double diameter, double inflow_speed) {
  if (torque_axial == 0.0) throw InvalidPhysics("zero axial torque: efficiency undefined");
  const double n2 = revolutions * revolutions;
  const double d4 = std::pow(diameter, 4);
  Coefficients c;
  c.kt = thrust_axial / (density * n2 * d4);
  c.kq = torque_axial / (density * n2 * d4 * diameter);
  c.eta = (thrust_axial / torque_axial) * inflow_speed / (2.0 * std::numbers::pi * revolutions);
  return c;
}

ForceResult make_force_result(const ForcePrimitives& prims, const OperatingPoint& op, const Vec3& axis) {
  ForceResult r;
  r.thrust = prims.thrust;
  r.torque = prims.torque;
  r.thrust_axial = prims.thrust.dot(axis);
  r.torque_axial = prims.torque.dot(axis);
  const auto c = coefficients_and_efficiency(r.thrust_axial, r.torque_axial, op.density, op.revolutions,
                                             op.diameter, op.inflow_speed());
  r.kt = c.kt;
  r.kq = c.kq;
  r.eta = c.eta;
  return r;
}

}  // namespace propopt
