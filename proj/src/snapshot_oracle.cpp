#include "propopt/snapshot_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include "propopt/binary_io.hpp"
#include "propopt/errors.hpp"
#include "propopt/parallel.hpp"

namespace propopt {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void OperatingPoint::validate() const {
  if (!(density > 0.0 && viscosity > 0.0 && revolutions > 0.0 && diameter > 0.0) ||
      !std::isfinite(advance_ratio)) {
    throw InvalidParameter("operating point needs positive density, viscosity, n and D");
  }
}

FieldOracle::FieldOracle(const BladeDefinition& baseline, const OperatingPoint& op) : op_(op) {
  op_.validate();
  baseline.validate();
  std::vector<double> pitch, chord;
  for (const auto& s : baseline.sections) {
    radii_.push_back(s.radius_fraction * baseline.tip_radius);
    pitch.push_back(s.pitch);
    chord.push_back(s.chord);
    shapes_.emplace_back(s);
  }
  pitch_ = CubicSpline(radii_, pitch);
  chord_ = CubicSpline(radii_, chord);
}

double FieldOracle::normalized_camber(double u, double r) const {
  const auto it = std::upper_bound(radii_.begin() + 1, radii_.end() - 1, r);
  const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
  const double t = std::clamp((r - radii_[k]) / (radii_[k + 1] - radii_[k]), 0.0, 1.0);
  return (1.0 - t) * shapes_[k].camber(u) / shapes_[k].chord() +
         t * shapes_[k + 1].camber(u) / shapes_[k + 1].chord();
}

double FieldOracle::normalized_thickness(double u, double r) const {
  const auto it = std::upper_bound(radii_.begin() + 1, radii_.end() - 1, r);
  const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
  const double t = std::clamp((r - radii_[k]) / (radii_[k + 1] - radii_[k]), 0.0, 1.0);
  return (1.0 - t) * shapes_[k].thickness(u) / shapes_[k].chord() +
         t * shapes_[k + 1].thickness(u) / shapes_[k + 1].chord();
}

double FieldOracle::pressure(double u, double r, int side, const DeformationParams& mu) const {
  if (!(r > 0.0)) throw InvalidInput("oracle evaluated at non-positive radius");
  const double u0 = op_.inflow_speed();
  const double omega_r = 2.0 * kPi * op_.revolutions * r;
  const double beta = std::atan(u0 / omega_r);
  const double phi = std::atan(mu.pitch * pitch_(r) / (2.0 * kPi * r));
  const double alpha = phi - beta;
  const double v2 = u0 * u0 + omega_r * omega_r;
  const double load = 4.0 * u * (1.0 - u);
  return 0.5 * v2 *
         (side * (2.0 * kPi * alpha + 4.0 * mu.camber * normalized_camber(u, r)) * load -
          1.0 * mu.thickness * normalized_thickness(u, r) * load);
}

Vec3 FieldOracle::shear(double u, double r, const Vec3& tangent, const DeformationParams& mu) const {
  if (!(r > 0.0)) throw InvalidInput("oracle evaluated at non-positive radius");
  const double u0 = op_.inflow_speed();
  const double omega_r = 2.0 * kPi * op_.revolutions * r;
  const double speed = std::sqrt(u0 * u0 + omega_r * omega_r);
  const double c = chord_(r);
  const double length = u * mu.chord * c + 0.01 * c;
  const double magnitude =
      0.0296 * std::pow(op_.viscosity, 0.2) * std::pow(speed, 1.8) * std::pow(length, -0.2);
  return magnitude * tangent;
}

FieldSnapshot FieldOracle::evaluate(const SurfaceGrid& grid, const DeformationParams& mu) const {
  FieldSnapshot snap;
  snap.mu = mu;
  snap.pressure.resize(grid.size());
  snap.shear.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::hypot(grid.position[i].x(), grid.position[i].y());
    snap.pressure[i] = pressure(grid.u[i], r, grid.side[i], mu);
    snap.shear[i] = shear(grid.u[i], r, grid.chord_tangent[i], mu);
  }
  return snap;
}

SurfaceGrid make_grid(const BladeSurface& surface, const GridSpec& spec) {
  return spec.kind == GridKind::quadrature ? gauss_quadrature_grid(surface, spec.n_u, spec.n_v)
                                           : sample_surface(surface, spec.n_u, spec.n_v);
}

std::vector<DeformationParams> sample_parameters(const SamplingPlan& plan, const ParameterBox& box) {
  if (plan.n_random < 0) throw InvalidInput("negative random sample count");
  std::mt19937_64 rng(plan.seed);
  std::vector<DeformationParams> rows;
  const auto collides = [&rows](const DeformationParams& mu) {
    return std::any_of(rows.begin(), rows.end(), [&](const DeformationParams& other) {
      const auto a = mu.to_array(), b = other.to_array();
      for (int i = 0; i < 4; ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12) return false;
      }
      return true;
    });
  };
  while (static_cast<int>(rows.size()) < plan.n_random) {
    std::array<double, 4> unit{};
    for (auto& x : unit) x = uniform01(rng);
    const auto mu = box.from_unit(unit);
    if (!collides(mu)) rows.push_back(mu);
  }
  if (plan.corners) {
    for (int c = 0; c < 16; ++c) {
      std::array<double, 4> x{};
      for (int i = 0; i < 4; ++i) x[i] = (c >> i) & 1 ? box.upper[i] : box.lower[i];
      const auto mu = DeformationParams::from_array(x);
      if (collides(mu)) throw InvalidInput("box corner duplicates a sampled parameter");
      rows.push_back(mu);
    }
  }
  return rows;
}

std::vector<std::string> dataset_field_names(GridKind kind) {
  std::vector<std::string> names{"pressure", "shear_x", "shear_y", "shear_z"};
  if (kind == GridKind::quadrature) {
    names.insert(names.end(), {"normal_x", "normal_y", "normal_z"});
  }
  return names;
}

const Eigen::MatrixXd& SnapshotDataset::field(const std::string& name) const {
  for (std::size_t i = 0; i < field_names.size(); ++i) {
    if (field_names[i] == name) return fields[i];
  }
  throw InvalidInput("dataset has no field '" + name + "'");
}

DeformationParams SnapshotDataset::parameter(std::size_t j) const {
  return {parameters(j, 0), parameters(j, 1), parameters(j, 2), parameters(j, 3)};
}

void SnapshotDataset::validate() const {
  if (field_names.size() != fields.size()) throw FormatError("field name/count mismatch");
  if (parameters.cols() != 4) throw FormatError("parameter matrix must have 4 columns");
  for (const auto& f : fields) {
    if (f.cols() != parameters.rows()) throw FormatError("snapshot count differs from parameter rows");
    if (f.rows() != fields[0].rows()) throw FormatError("fields differ in N_dof");
  }
  for (Eigen::Index i = 0; i < parameters.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if ((parameters.row(i) - parameters.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
        throw FormatError("duplicate parameter rows");
      }
    }
  }
}

std::vector<Eigen::VectorXd> snapshot_columns(const BladeDefinition& blade, const FieldOracle& oracle,
                                              const GridSpec& grid_spec, const DeformationParams& mu) {
  const BladeSurface surface(deform_blade(blade, mu));
  const SurfaceGrid grid = make_grid(surface, grid_spec);
  const FieldSnapshot snap = oracle.evaluate(grid, mu);
  const std::size_t n = grid.size();
  const std::size_t nf = grid_spec.kind == GridKind::quadrature ? 7 : 4;
  std::vector<Eigen::VectorXd> cols(nf, Eigen::VectorXd(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = snap.pressure[i];
    for (int c = 0; c < 3; ++c) cols[1 + c][i] = snap.shear[i][c];
    if (nf == 7) {
      for (int c = 0; c < 3; ++c) cols[4 + c][i] = grid.normal[i][c];
    }
  }
  return cols;
}

SnapshotDataset build_dataset(const BladeDefinition& blade, const SamplingPlan& plan,
                              const GridSpec& grid, const OperatingPoint& op, const ParameterBox& box,
                              int threads) {
  const auto rows = sample_parameters(plan, box);
  if (rows.empty()) throw InvalidInput("sampling plan produced no parameters");
  const FieldOracle oracle(blade, op);

  SnapshotDataset ds;
  ds.plan = plan;
  ds.grid = grid;
  ds.field_names = dataset_field_names(grid.kind);
  ds.parameters.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto a = rows[j].to_array();
    for (int i = 0; i < 4; ++i) ds.parameters(j, i) = a[i];
  }
  const std::size_t n_dof = make_grid(BladeSurface(blade), grid).size();
  ds.fields.assign(ds.field_names.size(),
                   Eigen::MatrixXd(static_cast<Eigen::Index>(n_dof), static_cast<Eigen::Index>(rows.size())));
  parallel_for(rows.size(), threads, [&](std::size_t j) {
    const auto cols = snapshot_columns(blade, oracle, grid, rows[j]);
    for (std::size_t f = 0; f < cols.size(); ++f) ds.fields[f].col(j) = cols[f];
  });
  return ds;
}

void save_dataset(const SnapshotDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  ByteWriter w;
  w.put_magic("PROMDS1");
  w.put_u32(kDatasetVersion);
  w.put_u32(static_cast<std::uint32_t>(ds.fields.size()));
  w.put_u64(ds.n_snapshots());
  for (std::size_t f = 0; f < ds.fields.size(); ++f) {
    w.put_string(ds.field_names[f]);
    w.put_u64(static_cast<std::uint64_t>(ds.fields[f].rows()));
    w.put_u64(static_cast<std::uint64_t>(ds.fields[f].cols()));
  }
  w.put_u64(ds.plan.seed);
  w.put_u32(static_cast<std::uint32_t>(ds.plan.n_random));
  w.put_u32(ds.plan.corners ? 1u : 0u);
  w.put_u32(static_cast<std::uint32_t>(ds.grid.kind));
  w.put_u32(static_cast<std::uint32_t>(ds.grid.n_u));
  w.put_u32(static_cast<std::uint32_t>(ds.grid.n_v));
  for (Eigen::Index i = 0; i < ds.parameters.rows(); ++i)
    for (Eigen::Index j = 0; j < 4; ++j) w.put_f64(ds.parameters(i, j));
  for (const auto& f : ds.fields) {
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index j = 0; j < f.cols(); ++j) w.put_f64(f(i, j));
  }
  w.put_crc32();
  w.write_file(path);
}

SnapshotDataset load_dataset(const std::filesystem::path& path) {
  auto r = ByteReader::from_file(path);
  r.expect_magic("PROMDS1");
  const std::uint32_t version = r.get_u32();
  if (version != kDatasetVersion) {
    throw UnsupportedVersion("unsupported dataset version " + std::to_string(version));
  }
  r.verify_and_strip_crc32();

  SnapshotDataset ds;
  const std::uint32_t nf = r.get_u32();
  const std::uint64_t m = r.get_u64();
  if (nf > 64) throw FormatError("implausible field count");
  std::vector<std::uint64_t> n_dofs;
  for (std::uint32_t f = 0; f < nf; ++f) {
    ds.field_names.push_back(r.get_string());
    n_dofs.push_back(r.get_u64());
    if (r.get_u64() != m) throw FormatError("field snapshot count differs from header");
  }
  ds.plan.seed = r.get_u64();
  ds.plan.n_random = static_cast<int>(r.get_u32());
  ds.plan.corners = r.get_u32() != 0;
  const std::uint32_t kind = r.get_u32();
  if (kind > 1) throw FormatError("unknown grid kind");
  ds.grid.kind = static_cast<GridKind>(kind);
  ds.grid.n_u = static_cast<int>(r.get_u32());
  ds.grid.n_v = static_cast<int>(r.get_u32());

  std::uint64_t expected = m * 4;
  for (auto n : n_dofs) expected += n * m;
  if (expected * 8 != r.remaining()) throw FormatError("dataset payload size mismatch");

  const auto params = r.get_f64s(m * 4);
  ds.parameters.resize(static_cast<Eigen::Index>(m), 4);
  for (std::uint64_t i = 0; i < m; ++i)
    for (int j = 0; j < 4; ++j) ds.parameters(i, j) = params[i * 4 + j];
  for (auto n : n_dofs) {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < m; ++j) f(i, j) = r.get_f64();
    ds.fields.push_back(std::move(f));
  }
  ds.validate();
  return ds;
}

void export_dataset_csv(const SnapshotDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "parameters.csv");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "snapshot,mu_pitch,mu_camber,mu_chord,mu_thickness\n";
    for (Eigen::Index i = 0; i < ds.parameters.rows(); ++i) {
      out << i;
      for (int j = 0; j < 4; ++j) out << "," << ds.parameters(i, j);
      out << "\n";
    }
  }
  for (std::size_t f = 0; f < ds.fields.size(); ++f) {
    std::ofstream out(dir / (ds.field_names[f] + ".csv"));
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "dof";
    for (Eigen::Index j = 0; j < ds.fields[f].cols(); ++j) out << ",s" << j;
    out << "\n";
    for (Eigen::Index i = 0; i < ds.fields[f].rows(); ++i) {
      out << i;
      for (Eigen::Index j = 0; j < ds.fields[f].cols(); ++j) out << "," << ds.fields[f](i, j);
      out << "\n";
    }
  }
}

}  // namespace propopt
