#include "propopt/blade_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "propopt/errors.hpp"
#include "propopt/quadrature.hpp"

namespace propopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate_distribution(const std::vector<ProfilePoint>& pts, const char* what) {
  if (pts.size() < 2) {
    throw InvalidGeometry(std::string(what) + " table needs at least two stations");
  }
  if (pts.front().chord_fraction != 0.0 || pts.back().chord_fraction != 1.0) {
    throw InvalidGeometry(std::string(what) + " table must start at chord fraction 0 and end at 1");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].chord_fraction > pts[i - 1].chord_fraction)) {
      throw InvalidGeometry(std::string(what) + " chord fractions must be strictly increasing");
    }
  }
  for (const auto& p : pts) {
    if (!std::isfinite(p.value)) throw InvalidGeometry(std::string(what) + " value is not finite");
  }
}

CubicSpline spline_of(const std::vector<ProfilePoint>& pts, bool close_ends) {
  std::vector<double> x(pts.size()), y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].chord_fraction;
    y[i] = pts[i].value;
  }
  if (close_ends) {
    y.front() = 0.0;
    y.back() = 0.0;
  }
  return CubicSpline(x, y);
}

// Value and first derivative of a natural spline column stored knot-major.
struct SplineEval {
  double value, slope;
};

SplineEval eval_column(std::span<const double> x, std::span<const double> y,
                       std::span<const double> m, std::size_t ncol, std::size_t col,
                       double at) {
  const auto it = std::upper_bound(x.begin() + 1, x.end() - 1, at);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double h = x[i + 1] - x[i];
  const double a = (x[i + 1] - at) / h;
  const double b = (at - x[i]) / h;
  const double y0 = y[i * ncol + col], y1 = y[(i + 1) * ncol + col];
  const double m0 = m[i * ncol + col], m1 = m[(i + 1) * ncol + col];
  return {a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
          (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0};
}

Vec3 rotate_z(const Vec3& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
}

double blade_angle(int blade, int n_blades) { return kTwoPi * blade / n_blades; }

}  // namespace

void SectionDefinition::validate() const {
  if (!(radius_fraction > 0.0 && radius_fraction <= 1.0)) {
    throw InvalidGeometry("section radius_fraction must lie in (0, 1]");
  }
  if (!(chord > 0.0) || !std::isfinite(chord)) throw InvalidGeometry("section chord must be positive");
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw InvalidGeometry("section pitch must be positive");
  validate_distribution(camber, "camber");
  validate_distribution(thickness, "thickness");
  for (const auto& t : thickness) {
    if (t.value < 0.0) throw InvalidGeometry("section thickness values must be >= 0");
  }
}

void BladeDefinition::validate() const {
  if (!(hub_radius > 0.0 && hub_radius < tip_radius)) {
    throw InvalidGeometry("blade needs 0 < hub radius < tip radius");
  }
  if (n_blades < 1) throw InvalidGeometry("blade count must be positive");
  if (sections.size() < 4) throw InvalidGeometry("blade needs at least 4 sections for cubic lofting");
  for (std::size_t k = 0; k < sections.size(); ++k) {
    sections[k].validate();
    if (k > 0 && !(sections[k].radius_fraction > sections[k - 1].radius_fraction)) {
      throw InvalidGeometry("sections must be ordered by increasing radius_fraction");
    }
  }
  const double root = hub_radius / tip_radius;
  if (std::abs(sections.front().radius_fraction - root) > 1e-12 ||
      std::abs(sections.back().radius_fraction - 1.0) > 1e-12) {
    throw InvalidGeometry("sections must span from r0/R to 1");
  }
}

DeformationParams DeformationParams::from_array(std::span<const double> a) {
  if (a.size() != 4) throw InvalidParameter("deformation parameters need exactly 4 components");
  return {a[0], a[1], a[2], a[3]};
}

DeformationParams operator*(const DeformationParams& a, const DeformationParams& b) {
  return {a.pitch * b.pitch, a.camber * b.camber, a.chord * b.chord, a.thickness * b.thickness};
}

bool ParameterBox::contains(const DeformationParams& mu, double tol) const {
  const auto x = mu.to_array();
  for (int i = 0; i < 4; ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

DeformationParams ParameterBox::clip(const DeformationParams& mu) const {
  auto x = mu.to_array();
  for (int i = 0; i < 4; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  return DeformationParams::from_array(x);
}

DeformationParams ParameterBox::center() const {
  std::array<double, 4> x{};
  for (int i = 0; i < 4; ++i) x[i] = 0.5 * (lower[i] + upper[i]);
  return DeformationParams::from_array(x);
}

std::array<double, 4> ParameterBox::to_unit(const DeformationParams& mu) const {
  auto x = mu.to_array();
  for (int i = 0; i < 4; ++i) x[i] = (x[i] - lower[i]) / (upper[i] - lower[i]);
  return x;
}

DeformationParams ParameterBox::from_unit(std::span<const double> unit) const {
  std::array<double, 4> x{};
  for (int i = 0; i < 4; ++i) x[i] = lower[i] + unit[i] * (upper[i] - lower[i]);
  return DeformationParams::from_array(x);
}

BladeDefinition synthetic_baseline_blade() {
  BladeDefinition blade;
  blade.tip_radius = 0.5;
  blade.hub_radius = 0.2 * blade.tip_radius;
  blade.n_blades = 6;
  const double diameter = blade.diameter();

  const std::vector<double> stations{0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                                     0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
  // r/R in {0.3, ..., 0.9} mapped affinely onto [r0/R, 1]
  for (int k = 0; k < 7; ++k) {
    const double nominal = 0.3 + 0.1 * k;
    SectionDefinition s;
    s.radius_fraction = 0.2 + (nominal - 0.3) / 0.6 * 0.8;
    if (k == 6) s.radius_fraction = 1.0;
    s.pitch = 1.0 * diameter;
    s.chord = 0.25 * diameter * (1.1 - s.radius_fraction);
    for (double x : stations) {
      const double camber = 0.02 * s.chord * 4.0 * x * (1.0 - x);
      const double w = x <= 0.3 ? (x - 0.3) / 0.3 : (x - 0.3) / 0.7;
      const double thickness = 0.06 * s.chord * (1.0 - w * w);
      s.camber.push_back({x, camber});
      s.thickness.push_back({x, thickness});
    }
    blade.sections.push_back(std::move(s));
  }
  return blade;
}

BladeDefinition deform_blade(const BladeDefinition& blade, const DeformationParams& mu,
                             const ParameterBox* box) {
  for (double f : mu.to_array()) {
    if (!std::isfinite(f) || f <= 0.0) {
      throw InvalidParameter("deformation factors must be finite and positive");
    }
  }
  if (box && !box->contains(mu)) throw InvalidParameter("deformation factors outside the parameter box");
  BladeDefinition out = blade;
  for (auto& s : out.sections) {
    s.pitch *= mu.pitch;
    s.chord *= mu.chord;
    for (auto& c : s.camber) c.value *= mu.camber;
    for (auto& t : s.thickness) t.value *= mu.thickness;
  }
  return out;
}

SectionShape::SectionShape(const SectionDefinition& section)
    : chord_(section.chord),
      camber_(spline_of(section.camber, false)),
      thickness_(spline_of(section.thickness, true)) {
  constexpr int kProbe = 400;
  for (int i = 0; i <= kProbe; ++i) {
    if (thickness_(static_cast<double>(i) / kProbe) < -1e-12 * chord_) {
      throw InvalidGeometry("interpolated thickness is negative");
    }
  }
}

double SectionShape::thickness(double u) const { return thickness_(u); }

Vec2 SectionShape::point(double u, int side) const {
  const double slope = camber_.derivative(u) / chord_;
  const double w = std::sqrt(1.0 + slope * slope);
  const double half_t = 0.5 * thickness_(u);
  // face (+1) is the lower curve: camber - t/2 * unit normal
  return {u * chord_ + side * half_t * slope / w, camber_(u) - side * half_t / w};
}

Vec2 SectionShape::point_du(double u, int side) const {
  const double slope = camber_.derivative(u) / chord_;
  const double slope_u = camber_.second_derivative(u) / chord_;
  const double w = std::sqrt(1.0 + slope * slope);
  const double w3 = w * w * w;
  const double half_t = 0.5 * thickness_(u);
  const double half_tu = 0.5 * thickness_.derivative(u);
  // n = (-s, 1)/w, dn/ds = (-1, -s)/w^3
  const Vec2 n{-slope / w, 1.0 / w};
  const Vec2 dn{-slope_u / w3, -slope * slope_u / w3};
  return Vec2{chord_, camber_.derivative(u)} - side * (half_tu * n + half_t * dn);
}

SectionProfile build_section_profile(const SectionDefinition& section, int n_points) {
  if (n_points < 8) throw InvalidInput("section profile needs n_points >= 8");
  section.validate();
  const SectionShape shape(section);
  SectionProfile profile;
  profile.upper.reserve(n_points);
  profile.lower.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double u = static_cast<double>(i) / (n_points - 1);
    profile.upper.push_back(shape.point(u, -1));
    profile.lower.push_back(shape.point(u, +1));
  }
  return profile;
}

BladeSurface::BladeSurface(const BladeDefinition& blade) : blade_(blade) {
  blade_.validate();
  const auto& secs = blade_.sections;
  const double f0 = secs.front().radius_fraction;
  const double f1 = secs.back().radius_fraction;
  for (const auto& s : secs) {
    shapes_.emplace_back(s);
    knots_.push_back((s.radius_fraction - f0) / (f1 - f0));
    const double r = s.radius_fraction * blade_.tip_radius;
    radii_.push_back(r);
    const double phi = std::atan(s.pitch / (2.0 * std::numbers::pi * r));
    cos_phi_.push_back(std::cos(phi));
    sin_phi_.push_back(std::sin(phi));
  }
  knots_.front() = 0.0;
  knots_.back() = 1.0;
  check_orientation();
}

double BladeSurface::radius_at(double v) const {
  return radii_.front() + v * (radii_.back() - radii_.front());
}

BladeSurface::Cylindrical BladeSurface::section_cyl(std::size_t k, int side, double u) const {
  const auto& s = blade_.sections[k];
  const Vec2 p = shapes_[k].point(u, side);
  const double xc = p.x() - 0.5 * s.chord;
  const double arc = xc * cos_phi_[k] + p.y() * sin_phi_[k];
  return {arc / radii_[k] + s.skew, xc * sin_phi_[k] - p.y() * cos_phi_[k] + s.rake};
}

BladeSurface::Cylindrical BladeSurface::section_cyl_du(std::size_t k, int side, double u) const {
  const Vec2 d = shapes_[k].point_du(u, side);
  return {(d.x() * cos_phi_[k] + d.y() * sin_phi_[k]) / radii_[k],
          d.x() * sin_phi_[k] - d.y() * cos_phi_[k]};
}

Vec3 BladeSurface::section_point(std::size_t k, Side side, double u, int blade) const {
  const auto c = section_cyl(k, static_cast<int>(side), u);
  const double r = radii_[k];
  return rotate_z({r * std::cos(c.theta), r * std::sin(c.theta), c.z},
                  blade_angle(blade, blade_.n_blades));
}

BladeSurface::ColumnSample BladeSurface::evaluate_column(Side side, double u,
                                                         std::span<const double> v,
                                                         int blade) const {
  const std::size_t nk = knots_.size();
  constexpr std::size_t ncol = 4;  // theta, z, theta_u, z_u
  std::vector<double> data(nk * ncol);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto c = section_cyl(k, static_cast<int>(side), u);
    const auto d = section_cyl_du(k, static_cast<int>(side), u);
    data[k * ncol + 0] = c.theta;
    data[k * ncol + 1] = c.z;
    data[k * ncol + 2] = d.theta;
    data[k * ncol + 3] = d.z;
  }
  const auto m = natural_spline_moments(knots_, data, ncol);
  const double psi = blade_angle(blade, blade_.n_blades);
  const double r_v = radii_.back() - radii_.front();

  ColumnSample out;
  out.position.reserve(v.size());
  out.du.reserve(v.size());
  out.dv.reserve(v.size());
  for (double vv : v) {
    const auto th = eval_column(knots_, data, m, ncol, 0, vv);
    const auto z = eval_column(knots_, data, m, ncol, 1, vv);
    const auto th_u = eval_column(knots_, data, m, ncol, 2, vv);
    const auto z_u = eval_column(knots_, data, m, ncol, 3, vv);
    const double r = radius_at(vv);
    const double theta = th.value + psi;
    const double c = std::cos(theta), s = std::sin(theta);
    out.position.emplace_back(r * c, r * s, z.value);
    out.du.emplace_back(-r * s * th_u.value, r * c * th_u.value, z_u.value);
    out.dv.emplace_back(r_v * c - r * s * th.slope, r_v * s + r * c * th.slope, z.slope);
  }
  return out;
}

Vec3 BladeSurface::evaluate(Side side, double u, double v, int blade) const {
  return evaluate_column(side, u, std::span<const double>(&v, 1), blade).position[0];
}

Vec3 BladeSurface::derivative_u(Side side, double u, double v, int blade) const {
  return evaluate_column(side, u, std::span<const double>(&v, 1), blade).du[0];
}

Vec3 BladeSurface::derivative_v(Side side, double u, double v, int blade) const {
  return evaluate_column(side, u, std::span<const double>(&v, 1), blade).dv[0];
}

Vec3 BladeSurface::normal(Side side, double u, double v, int blade) const {
  const auto c = evaluate_column(side, u, std::span<const double>(&v, 1), blade);
  const Vec3 n = c.du[0].cross(c.dv[0]);
  return side == Side::back ? n : Vec3(-n);
}

void BladeSurface::check_orientation() const {
  // Both faces share the chordwise and spanwise directions of the camber
  // surface, so S_u x S_v must agree in sign with the camber-surface normal.
  // probe lines: Gauss nodes plus every section, where a local defect is
  // strongest
  const auto rule = gauss_legendre(8);
  std::vector<double> vs = rule.nodes;
  vs.insert(vs.end(), knots_.begin(), knots_.end());
  for (double u : rule.nodes) {
    const auto f = evaluate_column(Side::face, u, vs);
    const auto b = evaluate_column(Side::back, u, vs);
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const Vec3 ref = (0.5 * (f.du[j] + b.du[j])).cross(0.5 * (f.dv[j] + b.dv[j]));
      if (f.du[j].cross(f.dv[j]).dot(ref) <= 0.0 || b.du[j].cross(b.dv[j]).dot(ref) <= 0.0) {
        throw InvalidGeometry("lofted surface folds over (negative area Jacobian)");
      }
    }
  }
}

std::size_t SurfaceGrid::index(Side s, int blade, int j, int i) const {
  const std::size_t side_idx = s == Side::face ? 0 : 1;
  return ((side_idx * n_blades + blade) * static_cast<std::size_t>(n_v) + j) * n_u + i;
}

namespace {

SurfaceGrid build_grid(const BladeSurface& surface, std::span<const double> us,
                       std::span<const double> vs, std::span<const double> wu,
                       std::span<const double> wv) {
  SurfaceGrid g;
  g.n_u = static_cast<int>(us.size());
  g.n_v = static_cast<int>(vs.size());
  g.n_blades = surface.n_blades();
  const std::size_t total = 2 * g.n_blades * g.patch_size();
  g.u.resize(total);
  g.v.resize(total);
  g.side.resize(total);
  g.position.resize(total);
  g.normal.resize(total);
  g.chord_tangent.resize(total);
  if (!wu.empty()) g.weight.resize(total);

  for (Side side : {Side::face, Side::back}) {
    // blade 0 columns, then rotated copies
    std::vector<BladeSurface::ColumnSample> cols;
    cols.reserve(us.size());
    for (double u : us) cols.push_back(surface.evaluate_column(side, u, vs));
    for (int b = 0; b < g.n_blades; ++b) {
      const double psi = 2.0 * std::numbers::pi * b / g.n_blades;
      for (int j = 0; j < g.n_v; ++j) {
        for (int i = 0; i < g.n_u; ++i) {
          const std::size_t idx = g.index(side, b, j, i);
          const auto& c = cols[i];
          Vec3 n = c.du[j].cross(c.dv[j]);
          if (side == Side::face) n = -n;
          g.u[idx] = us[i];
          g.v[idx] = vs[j];
          g.side[idx] = static_cast<std::int8_t>(side);
          g.position[idx] = rotate_z(c.position[j], psi);
          g.normal[idx] = rotate_z(n, psi);
          g.chord_tangent[idx] = rotate_z(-c.du[j].normalized(), psi);
          if (!wu.empty()) g.weight[idx] = wu[i] * wv[j];
        }
      }
    }
  }
  return g;
}

}  // namespace

QuadratureGrid gauss_quadrature_grid(const BladeSurface& surface, int n_u, int n_v) {
  if (n_u < 2 || n_v < 2) throw InvalidInput("quadrature grid needs n_u, n_v >= 2");
  const auto ru = gauss_legendre(n_u);
  const auto rv = gauss_legendre(n_v);
  return build_grid(surface, ru.nodes, rv.nodes, ru.weights, rv.weights);
}

SurfaceGrid sample_surface(const BladeSurface& surface, int n_u, int n_v) {
  if (n_u < 2 || n_v < 2) throw InvalidInput("surface lattice needs n_u, n_v >= 2");
  std::vector<double> us(n_u), vs(n_v);
  for (int i = 0; i < n_u; ++i) us[i] = static_cast<double>(i) / (n_u - 1);
  for (int j = 0; j < n_v; ++j) vs[j] = static_cast<double>(j) / (n_v - 1);
  return build_grid(surface, us, vs, {}, {});
}

std::vector<Vec3> root_points(const BladeDefinition& blade, int n, int blade_index) {
  if (n < 8) throw InvalidInput("root point count must be >= 8");
  const BladeSurface surface(blade);
  std::vector<Vec3> pts;
  pts.reserve(n);
  // back from leading to trailing edge (both ends included), then the face
  // interior from trailing back to leading edge
  const int n_back = n / 2 + 1;
  const int n_face = n - n_back;
  for (int i = 0; i < n_back; ++i) {
    pts.push_back(surface.section_point(0, Side::back, static_cast<double>(i) / (n_back - 1),
                                        blade_index));
  }
  for (int i = 0; i < n_face; ++i) {
    const double u = 1.0 - static_cast<double>(i + 1) / (n_face + 1);
    pts.push_back(surface.section_point(0, Side::face, u, blade_index));
  }
  return pts;
}

std::vector<Vec3> root_points_all_blades(const BladeDefinition& blade, int n) {
  std::vector<Vec3> all;
  all.reserve(static_cast<std::size_t>(n) * blade.n_blades);
  const auto first = root_points(blade, n, 0);
  for (int b = 0; b < blade.n_blades; ++b) {
    const double psi = 2.0 * std::numbers::pi * b / blade.n_blades;
    for (const auto& p : first) all.push_back(rotate_z(p, psi));
  }
  return all;
}

double quadrature_area(const QuadratureGrid& grid, Side side) {
  double area = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.side[i] == static_cast<std::int8_t>(side)) area += grid.weight[i] * grid.normal[i].norm();
  }
  return area;
}

}  // namespace propopt
