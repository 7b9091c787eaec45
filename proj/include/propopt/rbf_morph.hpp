#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "propopt/blade_geometry.hpp"

namespace propopt {

enum class KernelType { thin_plate_spline = 0, multiquadric = 1 };

struct RbfKernel {
  KernelType type = KernelType::thin_plate_spline;
  double epsilon = 1.0;  // multiquadric shape parameter

  static RbfKernel thin_plate_spline() { return {KernelType::thin_plate_spline, 1.0}; }
  static RbfKernel multiquadric(double eps);

  /// phi(r) = r^2 log r (phi(0) = 0), or sqrt(1 + (eps r)^2).
  double operator()(double r) const;
};

/// Radial-basis deformation in displacement form:
///   x_def = x + sum_i alpha_i phi(|x - c_i|)
/// with alpha solving Phi alpha = c_def - c_undef per coordinate.
class RbfDeformer {
 public:
  /// Throws InvalidInput for N < 4 or mismatched sizes and SingularSystem
  /// for near-duplicate control points or a condition estimate above 1e14.
  static RbfDeformer train(std::span<const Vec3> c_undef, std::span<const Vec3> c_def,
                           const RbfKernel& kernel);

  std::vector<Vec3> apply(std::span<const Vec3> points) const;
  Vec3 apply(const Vec3& point) const;

  const RbfKernel& kernel() const { return kernel_; }
  const Eigen::MatrixXd& control_points() const { return control_; }  // N x 3
  const Eigen::MatrixXd& weights() const { return weights_; }         // N x 3
  std::size_t size() const { return static_cast<std::size_t>(control_.rows()); }

  // Binary layout, every field a little-endian float64: kernel tag
  // (0 thin plate spline, 1 multiquadric), epsilon, N, control points
  // row-major (N x 3), weights row-major (N x 3).
  void save(const std::filesystem::path& path) const;
  static RbfDeformer load(const std::filesystem::path& path);

  bool operator==(const RbfDeformer& other) const;

 private:
  RbfKernel kernel_;
  Eigen::MatrixXd control_;
  Eigen::MatrixXd weights_;
};

/// Shaft morph: the shaft bases stay fixed, the blade roots move from
/// root_undef to root_def; the trained map is applied to the lateral points.
/// The displacement is interpolated in cylindrical components so points on
/// the shaft wall stay on it.
std::vector<Vec3> deform_shaft(std::span<const Vec3> shaft_lateral, std::span<const Vec3> shaft_bases,
                               std::span<const Vec3> root_undef, std::span<const Vec3> root_def,
                               const RbfKernel& kernel = RbfKernel::thin_plate_spline());

/// Volume morph: the fixed boundary points (inlet, outlet, outer wall and the
/// already deformed shaft) keep their position, the blade control points
/// move; the trained map is applied to the interior cloud.
std::vector<Vec3> deform_mesh(std::span<const Vec3> interior, std::span<const Vec3> fixed_boundaries,
                              std::span<const Vec3> blade_ctrl_undef,
                              std::span<const Vec3> blade_ctrl_def,
                              const RbfKernel& kernel = RbfKernel::thin_plate_spline());

/// Synthetic shaft: cylinder of `radius` about z between z_min and z_max.
struct ShaftGeometry {
  std::vector<Vec3> lateral;  // points on the cylinder wall
  std::vector<Vec3> bases;    // points on the two end disks
};
ShaftGeometry make_shaft(double radius, double z_min, double z_max, int n_theta, int n_z,
                         int n_rings);

/// Point-cloud CSV with header "x,y,z".
std::vector<Vec3> read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, std::span<const Vec3> points);

}  // namespace propopt
