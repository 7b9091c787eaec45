#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "propopt/blade_geometry.hpp"
#include "propopt/errors.hpp"
#include "propopt/quadrature.hpp"

using namespace propopt;

namespace {

constexpr double kPi = std::numbers::pi;

SectionDefinition flat_section(double camber_height, double thickness) {
  SectionDefinition s;
  s.radius_fraction = 0.5;
  s.pitch = 1.0;
  s.chord = 0.2;
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    s.camber.push_back({x, camber_height * 4.0 * x * (1.0 - x)});
    s.thickness.push_back({x, thickness * 4.0 * x * (1.0 - x)});
  }
  return s;
}

double max_gap(const SectionProfile& p) {
  double g = 0.0;
  for (std::size_t i = 0; i < p.upper.size(); ++i) g = std::max(g, (p.upper[i] - p.lower[i]).norm());
  return g;
}

// Chordwise coordinate of a blade-0 point on a cylinder of radius r with
// pitch angle phi (inverse of the cylindrical wrap).
double chordwise(const Vec3& p, double r, double phi) {
  return r * std::atan2(p.y(), p.x()) * std::cos(phi) + p.z() * std::sin(phi);
}

}  // namespace

TEST_CASE("synthetic baseline blade") {
  const auto b = synthetic_baseline_blade();
  CHECK(b.tip_radius == 0.5);
  CHECK(b.hub_radius == doctest::Approx(0.1));
  CHECK(b.n_blades == 6);
  REQUIRE(b.sections.size() == 7);
  CHECK(b.sections.front().radius_fraction == doctest::Approx(0.2));
  CHECK(b.sections.back().radius_fraction == 1.0);
  for (const auto& s : b.sections) {
    CHECK(s.pitch == doctest::Approx(1.0));
    CHECK(s.chord == doctest::Approx(0.25 * (1.1 - s.radius_fraction)));
    double tmax = 0.0, at = 0.0, cmax = 0.0;
    for (const auto& p : s.thickness) {
      if (p.value > tmax) tmax = p.value, at = p.chord_fraction;
    }
    for (const auto& p : s.camber) cmax = std::max(cmax, p.value);
    CHECK(tmax == doctest::Approx(0.06 * s.chord));
    CHECK(at == doctest::Approx(0.3));
    CHECK(cmax == doctest::Approx(0.02 * s.chord));
  }
  CHECK_NOTHROW(b.validate());
}

TEST_CASE("blade validation rejects malformed definitions") {
  auto b = synthetic_baseline_blade();
  SUBCASE("too few sections") { b.sections.resize(3); }
  SUBCASE("hub above tip") { b.hub_radius = 0.6; }
  SUBCASE("sections not spanning to the tip") { b.sections.back().radius_fraction = 0.95; }
  SUBCASE("negative thickness") { b.sections[2].thickness[3].value = -1e-3; }
  SUBCASE("chord fractions not starting at 0") { b.sections[1].camber.front().chord_fraction = 0.01; }
  SUBCASE("zero chord") { b.sections[4].chord = 0.0; }
  CHECK_THROWS_AS(b.validate(), Error);
}

TEST_CASE("deform_blade scales the four quantities") {
  const auto b = synthetic_baseline_blade();
  const DeformationParams mu{1.0, 0.95, 0.75, 1.27};
  const auto d = deform_blade(b, mu);
  for (std::size_t k = 0; k < b.sections.size(); ++k) {
    const auto& s0 = b.sections[k];
    const auto& s1 = d.sections[k];
    CHECK(s1.chord == doctest::Approx(0.75 * s0.chord).epsilon(1e-15));
    CHECK(s1.pitch == s0.pitch);
    CHECK(s1.radius_fraction == s0.radius_fraction);
    for (std::size_t i = 0; i < s0.thickness.size(); ++i) {
      CHECK(s1.thickness[i].value == doctest::Approx(1.27 * s0.thickness[i].value).epsilon(1e-15));
      CHECK(s1.camber[i].value == doctest::Approx(0.95 * s0.camber[i].value).epsilon(1e-15));
      CHECK(s1.thickness[i].chord_fraction == s0.thickness[i].chord_fraction);
    }
  }
  CHECK(b.hub_radius == d.hub_radius);
}

TEST_CASE("identity deformation returns the input unchanged") {
  const auto b = synthetic_baseline_blade();
  const auto d = deform_blade(b, DeformationParams::identity());
  for (std::size_t k = 0; k < b.sections.size(); ++k) {
    CHECK(d.sections[k].chord == b.sections[k].chord);
    CHECK(d.sections[k].pitch == b.sections[k].pitch);
    for (std::size_t i = 0; i < b.sections[k].thickness.size(); ++i) {
      CHECK(d.sections[k].thickness[i].value == b.sections[k].thickness[i].value);
      CHECK(d.sections[k].camber[i].value == b.sections[k].camber[i].value);
    }
  }
}

TEST_CASE("three-point thickness list scales linearly") {
  SectionDefinition s;
  s.radius_fraction = 0.5;
  s.pitch = 1.0;
  s.chord = 0.1;
  s.camber = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}};
  s.thickness = {{0.0, 0.0}, {0.5, 0.004}, {1.0, 0.0}};
  BladeDefinition b = synthetic_baseline_blade();
  b.sections[3] = s;
  b.sections[3].radius_fraction = 0.6;
  const auto d = deform_blade(b, {1, 1, 1, 1.3});
  CHECK(d.sections[3].thickness[0].value == 0.0);
  CHECK(d.sections[3].thickness[1].value == doctest::Approx(1.3 * 0.004).epsilon(1e-15));
  CHECK(d.sections[3].thickness[2].value == 0.0);
}

TEST_CASE("deformation composes multiplicatively") {
  const auto b = synthetic_baseline_blade();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> f(0.7, 1.3);
  for (int trial = 0; trial < 20; ++trial) {
    const DeformationParams m1{f(rng), f(rng), f(rng), f(rng)};
    const DeformationParams m2{f(rng), f(rng), f(rng), f(rng)};
    const auto twice = deform_blade(deform_blade(b, m1), m2);
    const auto once = deform_blade(b, m1 * m2);
    for (std::size_t k = 0; k < b.sections.size(); ++k) {
      CHECK(std::abs(twice.sections[k].chord - once.sections[k].chord) <= 1e-12 * once.sections[k].chord);
      CHECK(std::abs(twice.sections[k].pitch - once.sections[k].pitch) <= 1e-12);
      for (std::size_t i = 0; i < b.sections[k].thickness.size(); ++i) {
        CHECK(std::abs(twice.sections[k].thickness[i].value - once.sections[k].thickness[i].value) <= 1e-12);
        CHECK(std::abs(twice.sections[k].camber[i].value - once.sections[k].camber[i].value) <= 1e-12);
      }
    }
  }
}

TEST_CASE("deform_blade rejects bad factors") {
  const auto b = synthetic_baseline_blade();
  CHECK_THROWS_AS(deform_blade(b, {0.0, 1, 1, 1}), InvalidParameter);
  CHECK_THROWS_AS(deform_blade(b, {1, -0.5, 1, 1}), InvalidParameter);
  CHECK_THROWS_AS(deform_blade(b, {1, 1, std::nan(""), 1}), InvalidParameter);
  const auto box = ParameterBox::standard();
  CHECK_THROWS_AS(deform_blade(b, {1.2, 1, 1, 1}, &box), InvalidParameter);
  CHECK_NOTHROW(deform_blade(b, {1.1, 0.8, 1.3, 0.7}, &box));
}

TEST_CASE("parameter box") {
  const auto box = ParameterBox::standard();
  CHECK(box.lower == std::array<double, 4>{0.9, 0.8, 0.7, 0.7});
  CHECK(box.upper == std::array<double, 4>{1.1, 1.2, 1.3, 1.3});
  CHECK(box.contains(DeformationParams::identity()));
  CHECK_FALSE(box.contains({1.2, 1, 1, 1}));
  const auto c = box.clip({1.5, 0.1, 1.0, 2.0});
  CHECK(c == DeformationParams{1.1, 0.8, 1.0, 1.3});
  const auto u = box.to_unit({1.0, 1.2, 0.7, 1.0});
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(1.0));
  CHECK(u[2] == doctest::Approx(0.0));
  const auto back = box.from_unit(u);
  CHECK(back.camber == doctest::Approx(1.2));
  CHECK(box.center().chord == doctest::Approx(1.0));
}

TEST_CASE("section profiles") {
  SUBCASE("zero camber and thickness degenerate to the chord") {
    const auto p = build_section_profile(flat_section(0.0, 0.0), 16);
    for (std::size_t i = 0; i < p.upper.size(); ++i) {
      CHECK(p.upper[i].y() == doctest::Approx(0.0));
      CHECK(p.lower[i].y() == doctest::Approx(0.0));
      CHECK(p.upper[i].x() == doctest::Approx(p.lower[i].x()));
    }
    CHECK(p.upper.back().x() == doctest::Approx(0.2));
  }
  SUBCASE("symmetric thickness mirrors about the chord line") {
    const auto p = build_section_profile(flat_section(0.0, 0.01), 21);
    for (std::size_t i = 0; i < p.upper.size(); ++i) {
      CHECK(p.upper[i].y() == doctest::Approx(-p.lower[i].y()).epsilon(1e-14));
      CHECK(p.upper[i].x() == doctest::Approx(p.lower[i].x()).epsilon(1e-14));
    }
  }
  SUBCASE("edges are closed") {
    const auto p = build_section_profile(synthetic_baseline_blade().sections[2], 40);
    CHECK((p.upper.front() - p.lower.front()).norm() < 1e-15);
    CHECK((p.upper.back() - p.lower.back()).norm() < 1e-15);
  }
  SUBCASE("thickness x1.3 grows the maximum gap by exactly 1.3") {
    const auto b = synthetic_baseline_blade();
    const auto d = deform_blade(b, {1, 1, 1, 1.3});
    for (std::size_t k = 0; k < b.sections.size(); ++k) {
      const double g0 = max_gap(build_section_profile(b.sections[k], 201));
      const double g1 = max_gap(build_section_profile(d.sections[k], 201));
      CHECK(g1 / g0 == doctest::Approx(1.3).epsilon(1e-12));
    }
  }
  SUBCASE("American convention: thickness measured normal to the camber line") {
    const auto s = synthetic_baseline_blade().sections[1];
    const SectionShape shape(s);
    for (double u : {0.1, 0.3, 0.62}) {
      const Vec2 gap = shape.point(u, -1) - shape.point(u, +1);
      CHECK(gap.norm() == doctest::Approx(shape.thickness(u)).epsilon(1e-13));
      // gap is orthogonal to the camber tangent (c, dcamber/du)
      CHECK(std::abs(gap.dot(Vec2(s.chord, (shape.point(u + 1e-6, 0) - shape.point(u - 1e-6, 0)).y() / 2e-6))) <
            1e-8);
    }
  }
  CHECK_THROWS_AS(build_section_profile(flat_section(0.0, 0.01), 7), InvalidInput);
  SUBCASE("negative interpolated thickness") {
    auto s = flat_section(0.0, 0.0);
    s.thickness = {{0.0, 0.0}, {0.1, 0.02}, {0.2, 0.0}, {0.3, 0.02}, {1.0, 0.0}};
    CHECK_THROWS_AS(build_section_profile(s, 16), InvalidGeometry);
  }
}

TEST_CASE("analytic chordwise derivative agrees with central differences") {
  const SectionShape shape(synthetic_baseline_blade().sections[3]);
  for (int side : {-1, 1}) {
    for (double u : {0.05, 0.25, 0.5, 0.83}) {
      const Vec2 fd = (shape.point(u + 1e-6, side) - shape.point(u - 1e-6, side)) / 2e-6;
      CHECK((shape.point_du(u, side) - fd).norm() < 1e-7);
    }
  }
}

TEST_CASE("loft interpolates every section") {
  const auto b = synthetic_baseline_blade();
  const BladeSurface s(b);
  const auto knots = s.span_knots();
  REQUIRE(knots.size() == b.sections.size());
  for (std::size_t k = 0; k < knots.size(); ++k) {
    for (Side side : {Side::face, Side::back}) {
      for (double u : {0.0, 0.13, 0.5, 0.91, 1.0}) {
        const Vec3 a = s.evaluate(side, u, knots[k], 2);
        const Vec3 e = s.section_point(k, side, u, 2);
        CHECK((a - e).norm() < 1e-10 * b.sections[k].chord);
      }
    }
  }
  CHECK(s.radius_at(0.0) == doctest::Approx(0.1));
  CHECK(s.radius_at(1.0) == doctest::Approx(0.5));
}

TEST_CASE("surface points lie on their cylinder and blades are rotated copies") {
  const BladeSurface s(synthetic_baseline_blade());
  for (double v : {0.0, 0.37, 0.8}) {
    const Vec3 p = s.evaluate(Side::back, 0.4, v, 0);
    CHECK(std::hypot(p.x(), p.y()) == doctest::Approx(s.radius_at(v)).epsilon(1e-12));
    const Vec3 q = s.evaluate(Side::back, 0.4, v, 1);
    const double a = kPi / 3.0;
    CHECK(q.x() == doctest::Approx(std::cos(a) * p.x() - std::sin(a) * p.y()));
    CHECK(q.y() == doctest::Approx(std::sin(a) * p.x() + std::cos(a) * p.y()));
    CHECK(q.z() == doctest::Approx(p.z()));
  }
}

TEST_CASE("pitch x1.1 increases the pitch angle at every radius") {
  const auto b = synthetic_baseline_blade();
  const BladeSurface s0(b);
  const BladeSurface s1(deform_blade(b, {1.1, 1, 1, 1}));
  for (std::size_t k = 0; k < b.sections.size(); ++k) {
    const double v = s0.span_knots()[k];
    const double r = s0.radius_at(v);
    // the camber chord line from leading to trailing edge, unwrapped
    const auto angle = [&](const BladeSurface& s) {
      const Vec3 le = s.evaluate(Side::face, 0.0, v);
      const Vec3 te = s.evaluate(Side::face, 1.0, v);
      const double arc = r * (std::atan2(le.y(), le.x()) - std::atan2(te.y(), te.x()));
      return std::atan2(std::abs(te.z() - le.z()), std::abs(arc));
    };
    CHECK(angle(s1) > angle(s0));
    CHECK(angle(s0) == doctest::Approx(std::atan(1.0 / (2.0 * kPi * r))).epsilon(1e-12));
  }
}

TEST_CASE("analytic surface derivatives agree with central differences") {
  const BladeSurface s(synthetic_baseline_blade());
  const double h = 1e-5;
  for (Side side : {Side::face, Side::back}) {
    for (double u : {0.1, 0.5, 0.77}) {
      for (double v : {0.05, 0.5, 0.93}) {
        const Vec3 fu = (s.evaluate(side, u + h, v) - s.evaluate(side, u - h, v)) / (2 * h);
        const Vec3 fv = (s.evaluate(side, u, v + h) - s.evaluate(side, u, v - h)) / (2 * h);
        CHECK((s.derivative_u(side, u, v) - fu).norm() < 1e-6);
        CHECK((s.derivative_v(side, u, v) - fv).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("face and back normals point away from each other") {
  const BladeSurface s(synthetic_baseline_blade());
  for (double u : {0.05, 0.3, 0.6, 0.95}) {
    for (double v : {0.0, 0.4, 0.9}) {
      CHECK(s.normal(Side::face, u, v).dot(s.normal(Side::back, u, v)) < 0.0);
      // the back (suction side) faces downstream, -z... and the outward
      // normal points away from the opposite face
      const Vec3 mid = 0.5 * (s.evaluate(Side::face, u, v) + s.evaluate(Side::back, u, v));
      CHECK(s.normal(Side::back, u, v).dot(s.evaluate(Side::back, u, v) - mid) > 0.0);
      CHECK(s.normal(Side::face, u, v).dot(s.evaluate(Side::face, u, v) - mid) > 0.0);
    }
  }
}

TEST_CASE("quadrature grid layout and node count") {
  const BladeSurface s(synthetic_baseline_blade());
  const auto g = gauss_quadrature_grid(s, 30, 30);
  CHECK(g.size() == 10800);
  CHECK(g.weight.size() == g.size());
  const auto i = g.index(Side::back, 3, 7, 11);
  CHECK(g.side[i] == static_cast<std::int8_t>(Side::back));
  CHECK(g.u[i] == doctest::Approx(gauss_legendre(30).nodes[11]));
  CHECK(g.v[i] == doctest::Approx(gauss_legendre(30).nodes[7]));
  CHECK((g.position[i] - s.evaluate(Side::back, g.u[i], g.v[i], 3)).norm() < 1e-14);
  CHECK(g.index(Side::face, 0, 0, 0) == 0);
  CHECK_THROWS_AS(gauss_quadrature_grid(s, 1, 5), InvalidInput);
  for (std::size_t k = 0; k < g.size(); k += 97) {
    CHECK(g.chord_tangent[k].norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("baseline face area: dense quadrature regression constant") {
  const BladeSurface s(synthetic_baseline_blade());
  // six blades, computed once with 200 x 200 nodes
  const double face = 0.300474050721643;
  const double back = 0.303032564028106;
  const auto dense = gauss_quadrature_grid(s, 200, 200);
  CHECK(quadrature_area(dense, Side::face) == doctest::Approx(face).epsilon(1e-12));
  CHECK(quadrature_area(dense, Side::back) == doctest::Approx(back).epsilon(1e-12));
  // 30 x 30 is already within 1e-6
  const auto coarse = gauss_quadrature_grid(s, 30, 30);
  CHECK(quadrature_area(coarse, Side::face) == doctest::Approx(face).epsilon(1e-6));
}

TEST_CASE("quadrature area converges under doubling") {
  const BladeSurface s(synthetic_baseline_blade());
  double prev_area = 0.0, prev_step = 1e300;
  for (int n : {5, 10, 20, 40}) {
    const double a = quadrature_area(gauss_quadrature_grid(s, n, n), Side::face);
    if (n > 5) {
      const double step = std::abs(a - prev_area);
      CHECK(step < prev_step);
      CHECK(step / a < 1e-3);
      prev_step = step;
    }
    prev_area = a;
  }
}

TEST_CASE("lattice sampling") {
  const BladeSurface s(synthetic_baseline_blade());
  const auto g = sample_surface(s, 100, 100);
  CHECK(g.size() == 120000);
  CHECK(g.weight.empty());
  for (Side side : {Side::face, Side::back}) {
    CHECK((g.position[g.index(side, 0, 0, 0)] - s.evaluate(side, 0, 0)).norm() == 0.0);
    CHECK((g.position[g.index(side, 0, 99, 99)] - s.evaluate(side, 1, 1)).norm() < 1e-15);
    CHECK((g.position[g.index(side, 0, 0, 99)] - s.evaluate(side, 1, 0)).norm() < 1e-15);
  }
  // spacing halves when n doubles
  const auto spacing = [&](int n) {
    const auto l = sample_surface(s, n, n);
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i + 1 < n; ++i)
        m = std::max(m, (l.position[l.index(Side::face, 0, j, i + 1)] - l.position[l.index(Side::face, 0, j, i)]).norm());
    return m;
  };
  CHECK(spacing(41) / spacing(81) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("root points") {
  const auto b = synthetic_baseline_blade();
  const auto pts = root_points(b, 40);
  CHECK(pts.size() == 40);
  for (const auto& p : pts) CHECK(std::abs(std::hypot(p.x(), p.y()) - b.hub_radius) < 1e-9);
  CHECK(root_points_all_blades(b, 16).size() == 96);
  CHECK_THROWS_AS(root_points(b, 7), InvalidInput);

  const auto same = root_points(deform_blade(b, DeformationParams::identity()), 40);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((same[i] - pts[i]).norm() == 0.0);

  const double phi = std::atan(b.sections[0].pitch / (2.0 * kPi * b.hub_radius));
  const auto extent = [&](const std::vector<Vec3>& p) {
    double lo = 1e300, hi = -1e300;
    for (const auto& x : p) {
      lo = std::min(lo, chordwise(x, b.hub_radius, phi));
      hi = std::max(hi, chordwise(x, b.hub_radius, phi));
    }
    return hi - lo;
  };
  const auto shrunk = root_points(deform_blade(b, {1, 1, 0.75, 1}), 40);
  CHECK(extent(pts) == doctest::Approx(b.sections[0].chord).epsilon(1e-12));
  CHECK(extent(shrunk) / extent(pts) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("folded loft is rejected") {
  auto b = synthetic_baseline_blade();
  // half the thickness exceeds the camber line's radius of curvature (c/4
  // at mid-chord for a 50 % parabolic camber): the face curve cusps
  auto& s = b.sections[3];
  for (auto& p : s.camber) p.value = 0.5 * s.chord * 4.0 * p.chord_fraction * (1.0 - p.chord_fraction);
  for (auto& p : s.thickness) p.value = 0.8 * s.chord * 4.0 * p.chord_fraction * (1.0 - p.chord_fraction);
  CHECK_THROWS_AS(BladeSurface{b}, InvalidGeometry);
}
