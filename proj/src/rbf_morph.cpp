#include "propopt/rbf_morph.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "propopt/binary_io.hpp"
#include "propopt/errors.hpp"

namespace propopt {

namespace {

constexpr double kMaxCondition = 1e14;

Eigen::MatrixXd to_matrix(std::span<const Vec3> pts) {
  Eigen::MatrixXd m(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
  return m;
}

}  // namespace

RbfKernel RbfKernel::multiquadric(double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("multiquadric shape parameter must be positive");
  return {KernelType::multiquadric, eps};
}

double RbfKernel::operator()(double r) const {
  if (type == KernelType::thin_plate_spline) return r > 0.0 ? r * r * std::log(r) : 0.0;
  return std::sqrt(1.0 + epsilon * epsilon * r * r);
}

RbfDeformer RbfDeformer::train(std::span<const Vec3> c_undef, std::span<const Vec3> c_def,
                               const RbfKernel& kernel) {
  const std::size_t n = c_undef.size();
  if (n != c_def.size()) throw InvalidInput("undeformed and deformed control sets differ in size");
  if (n < 4) throw InvalidInput("RBF training needs at least 4 control points");

  Eigen::MatrixXd phi(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    phi(i, i) = kernel(0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double r = (c_undef[i] - c_undef[j]).norm();
      if (r < 1e-12) throw SingularSystem("duplicate RBF control points");
      phi(i, j) = phi(j, i) = kernel(r);
    }
  }
  Eigen::MatrixXd rhs(n, 3);
  for (std::size_t i = 0; i < n; ++i) rhs.row(i) = (c_def[i] - c_undef[i]).transpose();

  RbfDeformer d;
  d.kernel_ = kernel;
  d.control_ = to_matrix(c_undef);
  if (!phi.isApprox(phi.transpose(), 1e-12)) throw SingularSystem("RBF matrix is not symmetric");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(phi);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxCondition)) {
    throw SingularSystem("RBF interpolation matrix is singular (condition estimate > 1e14)");
  }
  d.weights_ = rhs.isZero(0.0) ? Eigen::MatrixXd::Zero(n, 3) : Eigen::MatrixXd(lu.solve(rhs));
  return d;
}

Vec3 RbfDeformer::apply(const Vec3& x) const {
  Vec3 out = x;
  const Eigen::Index n = control_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = x.x() - control_(i, 0);
    const double dy = x.y() - control_(i, 1);
    const double dz = x.z() - control_(i, 2);
    const double p = kernel_(std::sqrt(dx * dx + dy * dy + dz * dz));
    out.x() += weights_(i, 0) * p;
    out.y() += weights_(i, 1) * p;
    out.z() += weights_(i, 2) * p;
  }
  return out;
}

std::vector<Vec3> RbfDeformer::apply(std::span<const Vec3> points) const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  if (weights_.isZero(0.0)) {
    out.assign(points.begin(), points.end());
    return out;
  }
  for (const auto& p : points) out.push_back(apply(p));
  return out;
}

bool RbfDeformer::operator==(const RbfDeformer& o) const {
  return kernel_.type == o.kernel_.type && kernel_.epsilon == o.kernel_.epsilon &&
         control_ == o.control_ && weights_ == o.weights_;
}

void RbfDeformer::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.put_f64(static_cast<double>(kernel_.type));
  w.put_f64(kernel_.epsilon);
  w.put_f64(static_cast<double>(control_.rows()));
  for (Eigen::Index i = 0; i < control_.rows(); ++i)
    for (int c = 0; c < 3; ++c) w.put_f64(control_(i, c));
  for (Eigen::Index i = 0; i < weights_.rows(); ++i)
    for (int c = 0; c < 3; ++c) w.put_f64(weights_(i, c));
  w.write_file(path);
}

RbfDeformer RbfDeformer::load(const std::filesystem::path& path) {
  auto r = ByteReader::from_file(path);
  RbfDeformer d;
  const double tag = r.get_f64();
  if (tag == 0.0) d.kernel_.type = KernelType::thin_plate_spline;
  else if (tag == 1.0) d.kernel_.type = KernelType::multiquadric;
  else throw FormatError("unknown RBF kernel tag");
  d.kernel_.epsilon = r.get_f64();
  const double n_raw = r.get_f64();
  if (!(n_raw >= 0.0) || n_raw != std::floor(n_raw)) throw FormatError("bad control point count");
  const auto n = static_cast<Eigen::Index>(n_raw);
  if (static_cast<std::size_t>(n) * 48 != r.remaining()) throw FormatError("deformer file size mismatch");
  d.control_.resize(n, 3);
  d.weights_.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) d.control_(i, c) = r.get_f64();
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) d.weights_(i, c) = r.get_f64();
  return d;
}

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> deform_shaft(std::span<const Vec3> shaft_lateral, std::span<const Vec3> shaft_bases,
                               std::span<const Vec3> root_undef, std::span<const Vec3> root_def,
                               const RbfKernel& kernel) {
  if (shaft_lateral.empty() || shaft_bases.empty() || root_undef.empty()) {
    throw InvalidInput("shaft morph needs lateral, base and root points");
  }
  if (root_def.size() != root_undef.size()) throw InvalidInput("root point sets differ in size");
  // Displacements are interpolated in cylindrical components (dr, r dtheta,
  // dz): roots slide on the shaft cylinder, so dr vanishes at every control
  // point and the lateral wall stays on the cylinder.
  std::vector<Vec3> undef(shaft_bases.begin(), shaft_bases.end());
  std::vector<Vec3> target(shaft_bases.begin(), shaft_bases.end());
  for (std::size_t i = 0; i < root_undef.size(); ++i) {
    const Vec3& a = root_undef[i];
    const Vec3& b = root_def[i];
    const double ra = std::hypot(a.x(), a.y());
    const double rb = std::hypot(b.x(), b.y());
    const double dtheta = std::remainder(std::atan2(b.y(), b.x()) - std::atan2(a.y(), a.x()), 2.0 * kPi);
    undef.push_back(a);
    target.push_back(a + Vec3(rb - ra, ra * dtheta, b.z() - a.z()));
  }
  const auto moved = RbfDeformer::train(undef, target, kernel).apply(shaft_lateral);
  std::vector<Vec3> out(shaft_lateral.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec3& x = shaft_lateral[i];
    const Vec3 d = moved[i] - x;
    const double r = std::hypot(x.x(), x.y());
    if (r == 0.0) {
      out[i] = x + Vec3(0.0, 0.0, d.z());
      continue;
    }
    const double theta = std::atan2(x.y(), x.x()) + d.y() / r;
    out[i] = Vec3((r + d.x()) * std::cos(theta), (r + d.x()) * std::sin(theta), x.z() + d.z());
  }
  return out;
}

std::vector<Vec3> deform_mesh(std::span<const Vec3> interior, std::span<const Vec3> fixed_boundaries,
                              std::span<const Vec3> blade_ctrl_undef,
                              std::span<const Vec3> blade_ctrl_def, const RbfKernel& kernel) {
  if (fixed_boundaries.empty() || blade_ctrl_undef.empty()) {
    throw InvalidInput("mesh morph needs boundary and blade control points");
  }
  std::vector<Vec3> undef(fixed_boundaries.begin(), fixed_boundaries.end());
  std::vector<Vec3> def(fixed_boundaries.begin(), fixed_boundaries.end());
  undef.insert(undef.end(), blade_ctrl_undef.begin(), blade_ctrl_undef.end());
  def.insert(def.end(), blade_ctrl_def.begin(), blade_ctrl_def.end());
  return RbfDeformer::train(undef, def, kernel).apply(interior);
}

ShaftGeometry make_shaft(double radius, double z_min, double z_max, int n_theta, int n_z,
                         int n_rings) {
  if (n_theta < 3 || n_z < 2 || n_rings < 1) throw InvalidInput("shaft resolution too small");
  ShaftGeometry g;
  for (int j = 0; j < n_z; ++j) {
    const double z = z_min + (z_max - z_min) * j / (n_z - 1);
    for (int i = 0; i < n_theta; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n_theta;
      g.lateral.emplace_back(radius * std::cos(t), radius * std::sin(t), z);
    }
  }
  for (double z : {z_min, z_max}) {
    g.bases.emplace_back(0.0, 0.0, z);
    for (int k = 1; k <= n_rings; ++k) {
      const double rr = radius * k / n_rings;
      for (int i = 0; i < n_theta; ++i) {
        const double t = 2.0 * std::numbers::pi * (i + 0.5 * (k % 2)) / n_theta;
        g.bases.emplace_back(rr * std::cos(t), rr * std::sin(t), z);
      }
    }
  }
  return g;
}

std::vector<Vec3> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open point file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,z", 0) != 0) {
    throw FormatError(path.string() + ": expected header x,y,z");
  }
  std::vector<Vec3> pts;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    Vec3 p;
    char c1 = 0, c2 = 0;
    if (!(ss >> p.x() >> c1 >> p.y() >> c2 >> p.z()) || c1 != ',' || c2 != ',') {
      throw FormatError(path.string() + ": malformed row '" + line + "'");
    }
    pts.push_back(p);
  }
  return pts;
}

void write_points_csv(const std::filesystem::path& path, std::span<const Vec3> points) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write point file " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << "x,y,z\n";
  for (const auto& p : points) out << p.x() << "," << p.y() << "," << p.z() << "\n";
}

}  // namespace propopt
