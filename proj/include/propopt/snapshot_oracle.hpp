#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "propopt/blade_geometry.hpp"
#include "propopt/spline.hpp"

namespace propopt {

/// Open-water operating point. Defaults: fresh water, n = 15 rev/s, J = 0.85,
/// D = 1 m.
struct OperatingPoint {
  double density = 998.2;      // kg/m^3
  double viscosity = 1.0e-6;   // kinematic, m^2/s
  double revolutions = 15.0;   // 1/s
  double advance_ratio = 0.85;
  double diameter = 1.0;       // m

  double inflow_speed() const { return advance_ratio * revolutions * diameter; }
  void validate() const;
};

/// Density-normalized surface fields on one point set.
struct FieldSnapshot {
  std::vector<double> pressure;  // m^2/s^2
  std::vector<Vec3> shear;       // wall traction, m^2/s^2
  DeformationParams mu;
};

/// Deterministic analytic stand-in for the CFD solver.
///
/// With beta = atan(u0 / (2 pi n r)), phi = atan(mu_pitch P(r) / (2 pi r)),
/// alpha = phi - beta, V^2 = u0^2 + (2 pi n r)^2 and l(u) = 4u(1-u):
///
///   p   = V^2/2 * ( s [2 pi alpha + 4 mu_camber cbar(u)] l(u) - mu_thickness tbar(u) l(u) )
///   tau = 0.0296 nu^0.2 V^1.8 (u mu_chord c(r) + 0.01 c(r))^-0.2 * tangent
///
/// where s = +1 on the face and -1 on the back, P and c are the baseline
/// pitch and chord, and cbar, tbar the baseline camber and thickness divided
/// by the chord. The tangent points from the trailing toward the leading
/// edge so that p n_out + tau is the force the blade exerts on the fluid.
class FieldOracle {
 public:
  FieldOracle(const BladeDefinition& baseline, const OperatingPoint& op);

  const OperatingPoint& operating_point() const { return op_; }

  double pressure(double u, double r, int side, const DeformationParams& mu) const;
  Vec3 shear(double u, double r, const Vec3& tangent, const DeformationParams& mu) const;

  /// Evaluate both fields at every grid point. Throws InvalidInput if any
  /// point has r <= 0.
  FieldSnapshot evaluate(const SurfaceGrid& grid, const DeformationParams& mu) const;

 private:
  double normalized_camber(double u, double r) const;
  double normalized_thickness(double u, double r) const;

  OperatingPoint op_;
  std::vector<double> radii_;
  CubicSpline pitch_;
  CubicSpline chord_;
  std::vector<SectionShape> shapes_;
};

enum class GridKind : std::uint32_t { lattice = 0, quadrature = 1 };

struct GridSpec {
  GridKind kind = GridKind::quadrature;
  int n_u = 30;
  int n_v = 30;
};

/// Build the point set a dataset is defined on for a given blade.
SurfaceGrid make_grid(const BladeSurface& surface, const GridSpec& spec);

struct SamplingPlan {
  int n_random = 200;
  bool corners = true;
  std::uint64_t seed = 0;
};

/// Parameter rows: n_random uniform draws in the box (std::mt19937_64, 53-bit
/// mantissa scaling), followed by the 16 box corners when requested. Corner
/// c takes the upper bound of component i when bit i of c is set.
std::vector<DeformationParams> sample_parameters(const SamplingPlan& plan, const ParameterBox& box);

struct SnapshotDataset {
  std::vector<std::string> field_names;
  std::vector<Eigen::MatrixXd> fields;  // N_dof x M each
  Eigen::MatrixXd parameters;           // M x 4
  SamplingPlan plan;
  GridSpec grid;

  std::size_t n_snapshots() const { return static_cast<std::size_t>(parameters.rows()); }
  std::size_t n_dof() const { return fields.empty() ? 0 : static_cast<std::size_t>(fields[0].rows()); }
  const Eigen::MatrixXd& field(const std::string& name) const;
  DeformationParams parameter(std::size_t j) const;
  void validate() const;
};

/// Fields stored per grid kind: pressure and the three shear components; a
/// quadrature dataset also stores the three area-weighted normal components.
std::vector<std::string> dataset_field_names(GridKind kind);

/// Evaluate the oracle on the deformed blade of every plan row. Columns
/// follow the parameter order regardless of `threads`.
SnapshotDataset build_dataset(const BladeDefinition& blade, const SamplingPlan& plan,
                              const GridSpec& grid, const OperatingPoint& op,
                              const ParameterBox& box = ParameterBox::standard(), int threads = 1);

/// Snapshot columns for one parameter vector, in dataset_field_names order.
std::vector<Eigen::VectorXd> snapshot_columns(const BladeDefinition& blade, const FieldOracle& oracle,
                                              const GridSpec& grid, const DeformationParams& mu);

// Binary container, little-endian:
//   "PROMDS1" | u32 version | u32 field count | u64 M
//   per field: u32 name length, name bytes, u64 N_dof, u64 M
//   u64 seed | u32 n_random | u32 corners | u32 grid kind | u32 n_u | u32 n_v
//   parameter matrix M x 4 (f64, row-major)
//   per field: N_dof x M block (f64, row-major)
//   u32 CRC32 of all preceding bytes
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const SnapshotDataset& ds, const std::filesystem::path& path);
SnapshotDataset load_dataset(const std::filesystem::path& path);

/// Inspection export: parameters.csv plus one <field>.csv per field (one row
/// per degree of freedom, one column per snapshot).
void export_dataset_csv(const SnapshotDataset& ds, const std::filesystem::path& dir);

}  // namespace propopt
