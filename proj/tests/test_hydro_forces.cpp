#include <doctest.h>

#include <cmath>
#include <numbers>

#include "propopt/errors.hpp"
#include "propopt/hydro_forces.hpp"
#include "propopt/quadrature.hpp"
#include "propopt/snapshot_oracle.hpp"

using namespace propopt;

namespace {

std::vector<Vec3> flat_lattice(int n_u, int n_v, double su = 1.0, double sv = 1.0) {
  std::vector<Vec3> pts;
  for (int j = 0; j < n_v; ++j)
    for (int i = 0; i < n_u; ++i) pts.emplace_back(su * i / (n_u - 1), sv * j / (n_v - 1), 0.0);
  return pts;
}

ForceResult fast_forces(const BladeDefinition& b, int n, const DeformationParams& mu = {}) {
  const OperatingPoint op;
  const auto deformed = deform_blade(b, mu);
  const auto grid = gauss_quadrature_grid(BladeSurface(deformed), n, n);
  const auto fields = FieldOracle(b, op).evaluate(grid, mu);
  return make_force_result(forces_fast(grid.position, grid.weight, grid.normal, fields.pressure, fields.shear,
                                       op.density),
                           op);
}

}  // namespace

TEST_CASE("unit square triangulation") {
  const auto pts = flat_lattice(2, 2);
  const auto tri = triangulate(pts, 2, 2);
  REQUIRE(tri.size() == 2);
  CHECK(tri.area[0] == doctest::Approx(0.5));
  CHECK(tri.total_area() == doctest::Approx(1.0));
  for (const auto& n : tri.unit_normal) CHECK((n - Vec3::UnitZ()).norm() < 1e-15);
  const auto flipped = triangulate(pts, 2, 2, true);
  for (const auto& n : flipped.unit_normal) CHECK((n + Vec3::UnitZ()).norm() < 1e-15);
  CHECK_THROWS_AS(triangulate(pts, 3, 2), InvalidInput);
}

TEST_CASE("planar lattice: identical normals and exact constant-pressure force") {
  const auto pts = flat_lattice(7, 5, 2.0, 0.5);
  const auto tri = triangulate(pts, 7, 5);
  CHECK(tri.size() == 2 * 6 * 4);
  CHECK(tri.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  for (const auto& n : tri.unit_normal) CHECK(n == tri.unit_normal[0]);
  const std::vector<double> p(pts.size(), 1.0);
  const std::vector<Vec3> zero(pts.size(), Vec3::Zero());
  const double rho = 998.2;
  const auto f = forces_standard(tri, to_centroids(tri, p), to_centroids(tri, zero), rho);
  CHECK((f.thrust - rho * Vec3::UnitZ()).norm() < 1e-12);
  const auto z = forces_standard(tri, to_centroids(tri, std::vector<double>(pts.size(), 0.0)),
                                 to_centroids(tri, zero), rho);
  CHECK(z.thrust.norm() == 0.0);
  CHECK(z.torque.norm() == 0.0);
}

TEST_CASE("fast path on a flat patch integrates constants exactly") {
  const int n = 4;
  std::vector<Vec3> x, normal;
  std::vector<double> w, p;
  const auto g = gauss_legendre(n, 0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      x.emplace_back(2 * g.nodes[i], 3 * g.nodes[j], 0);
      normal.emplace_back(0, 0, 6.0);  // |dx/du x dx/dv|
      w.push_back(g.weights[i] * g.weights[j]);
      p.push_back(2.5);
    }
  const std::vector<Vec3> tau(x.size(), Vec3(1, 0, 0));
  const auto f = forces_fast(x, w, normal, p, tau, 1.0);
  CHECK(f.thrust.x() == doctest::Approx(6.0));
  CHECK(f.thrust.z() == doctest::Approx(15.0));
  // uniform load: Q = (load per area) x centroid * area
  const Vec3 expected = Vec3(1, 0, 2.5).cross(Vec3(1, 1.5, 0)) * 6.0;
  CHECK((f.torque - expected).norm() < 1e-12);
}

TEST_CASE("coefficients and efficiency") {
  const auto c = coefficients_and_efficiency(2 * std::numbers::pi, 1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(c.eta == doctest::Approx(1.0));
  CHECK(c.kt == doctest::Approx(2 * std::numbers::pi));
  // scaling T and Q together leaves eta unchanged
  const auto a = coefficients_and_efficiency(100.0, 20.0, 998.2, 15.0, 1.0, 12.75);
  const auto b = coefficients_and_efficiency(300.0, 60.0, 998.2, 15.0, 1.0, 12.75);
  CHECK(a.eta == doctest::Approx(b.eta).epsilon(1e-15));
  CHECK(b.kt == doctest::Approx(3 * a.kt));
  CHECK(a.kt == doctest::Approx(100.0 / (998.2 * 225.0)));
  CHECK(a.kq == doctest::Approx(20.0 / (998.2 * 225.0)));
  CHECK_THROWS_AS(coefficients_and_efficiency(1.0, 0.0, 1.0, 1.0, 1.0, 1.0), InvalidPhysics);
  OperatingPoint op;
  CHECK(op.inflow_speed() == doctest::Approx(12.75));
}

TEST_CASE("axial torque is invariant under a shift along the axis") {
  const auto b = synthetic_baseline_blade();
  const OperatingPoint op;
  const auto grid = gauss_quadrature_grid(BladeSurface(b), 8, 8);
  const auto fields = FieldOracle(b, op).evaluate(grid, {});
  auto shifted = grid.position;
  for (auto& x : shifted) x.z() += 3.7;
  const auto f0 = make_force_result(forces_fast(grid.position, grid.weight, grid.normal, fields.pressure,
                                                fields.shear, op.density), op);
  const auto f1 = make_force_result(forces_fast(shifted, grid.weight, grid.normal, fields.pressure, fields.shear,
                                                op.density), op);
  CHECK(std::abs(f1.torque_axial - f0.torque_axial) < 1e-10 * std::abs(f0.torque_axial));
  CHECK(f1.thrust_axial == f0.thrust_axial);
}

TEST_CASE("triangulated blade area agrees with quadrature") {
  const auto b = synthetic_baseline_blade();
  const BladeSurface s(b);
  const auto lattice = sample_surface(s, 100, 100);
  const auto tri = triangulate(lattice);
  const auto quad = gauss_quadrature_grid(s, 30, 30);
  double a = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) a += quad.weight[i] * quad.normal[i].norm();
  CHECK(tri.degenerate == 0);
  CHECK(std::abs(tri.total_area() / a - 1.0) < 0.01);
  // outward: triangle normals agree with the analytic lattice normals
  int disagree = 0;
  for (std::size_t t = 0; t < tri.size(); ++t) {
    const auto& v = tri.triangles[t];
    if (tri.unit_normal[t].dot(lattice.normal[v[0]]) <= 0) ++disagree;
  }
  CHECK(disagree == 0);
}

TEST_CASE("baseline forces: frozen dense reference, refinement and path agreement") {
  const auto b = synthetic_baseline_blade();
  const auto dense = fast_forces(b, 120);
  CHECK(dense.thrust_axial == doctest::Approx(61438.6192308872).epsilon(1e-9));
  CHECK(dense.torque_axial == doctest::Approx(10111.0571171407).epsilon(1e-9));
  CHECK(dense.eta == doctest::Approx(0.822022945666672).epsilon(1e-9));
  CHECK(dense.kt == doctest::Approx(0.273552925180379).epsilon(1e-9));
  CHECK(dense.kq == doctest::Approx(0.0450190659504475).epsilon(1e-9));

  const auto f30 = fast_forces(b, 30);
  const auto f60 = fast_forces(b, 60);
  CHECK(std::abs(f30.thrust_axial / f60.thrust_axial - 1.0) < 1e-3);

  const OperatingPoint op;
  const auto lattice = sample_surface(BladeSurface(b), 100, 100);
  const auto tri = triangulate(lattice);
  const auto fields = FieldOracle(b, op).evaluate(lattice, {});
  const auto std_forces =
      make_force_result(forces_standard(tri, to_centroids(tri, fields.pressure), to_centroids(tri, fields.shear),
                                        op.density), op);
  CHECK(std::abs(std_forces.eta / f30.eta - 1.0) < 1e-2);
  CHECK(std_forces.thrust_axial > 0);
  CHECK(std_forces.torque_axial > 0);
}
