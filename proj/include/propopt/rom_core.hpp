#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "propopt/blade_geometry.hpp"
#include "propopt/snapshot_oracle.hpp"

namespace propopt {

/// Either a fixed rank or the smallest rank reaching an energy fraction of
/// sum(sigma_i^2).
struct TruncationRule {
  int rank = 0;          // > 0 selects a fixed rank
  double energy = 0.999; // used when rank == 0

  static TruncationRule fixed(int l) { return {l, 0.0}; }
  static TruncationRule energy_fraction(double e) { return {0, e}; }
};

struct PodBasis {
  Eigen::MatrixXd modes;                // N_dof x L, orthonormal columns
  Eigen::VectorXd singular_values;      // all min(N_dof, M) values, non-increasing
  int rank() const { return static_cast<int>(modes.cols()); }
};

/// Truncated thin SVD of S without mean-centering. The first entry of each
/// mode with magnitude above 1e-12 is made positive.
PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const TruncationRule& rule);

/// Reduced coefficients U^T S (L x M).
Eigen::MatrixXd project(const Eigen::MatrixXd& snapshots, const PodBasis& basis);

enum class ApproxMethod { rbf = 0, gpr = 1, knr = 2 };

const char* to_string(ApproxMethod m);
ApproxMethod approx_method_from_string(const std::string& s);

struct ApproxConfig {
  ApproxMethod method = ApproxMethod::rbf;
  double epsilon = 1.0;       // multiquadric shape parameter (normalized coordinates)
  double length_scale = 0.5;  // squared-exponential GPR length scale
  double jitter = 1e-10;      // GPR diagonal jitter
  int k = 5;                  // KNR neighbours, uniform weights

  static ApproxConfig rbf(double eps = 1.0) { return {ApproxMethod::rbf, eps}; }
  static ApproxConfig gpr(double length = 0.5, double jitter = 1e-10) {
    return {ApproxMethod::gpr, 1.0, length, jitter};
  }
  static ApproxConfig knr(int k = 5) { return {ApproxMethod::knr, 1.0, 0.5, 1e-10, k}; }
};

/// Maps a parameter vector to the L reduced coefficients. Parameters are
/// compared in box-normalized coordinates (each component mapped to [0,1]).
class Approximant {
 public:
  /// params: M x 4 raw parameters, coeffs: L x M.
  static Approximant fit(const Eigen::MatrixXd& params, const Eigen::MatrixXd& coeffs,
                         const ApproxConfig& config, const ParameterBox& box);

  Eigen::VectorXd predict(const DeformationParams& mu) const;
  const ApproxConfig& config() const { return config_; }
  const ParameterBox& box() const { return box_; }

 private:
  friend class RomModel;
  Eigen::VectorXd kernel_row(const Eigen::RowVector4d& x) const;

  ApproxConfig config_;
  ParameterBox box_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> centers_;  // normalized, M x 4
  Eigen::MatrixXd values_;  // rbf/gpr: weights M x L; knr: training coeffs M x L
  Eigen::RowVectorXd mean_; // subtracted target mean (rbf, gpr), zeros for knr
};

struct FieldRom {
  std::string name;
  PodBasis basis;
  Approximant approximant;
};

struct RomConfig {
  TruncationRule truncation;
  ApproxConfig method;                             // default for every field
  std::map<std::string, ApproxConfig> per_field;   // overrides
  ParameterBox box = ParameterBox::standard();

  ApproxConfig method_for(const std::string& field) const;
};

class RomModel {
 public:
  static RomModel train(const SnapshotDataset& ds, const RomConfig& config);

  struct Prediction {
    std::vector<Eigen::VectorXd> fields;  // same order as field_names()
    bool out_of_box = false;
  };
  Prediction predict(const DeformationParams& mu) const;
  Eigen::VectorXd predict_field(const std::string& name, const DeformationParams& mu) const;

  std::vector<std::string> field_names() const;
  const FieldRom& field(const std::string& name) const;
  const std::vector<FieldRom>& fields() const { return fields_; }
  const ParameterBox& box() const { return box_; }
  const Eigen::MatrixXd& parameters() const { return parameters_; }
  const GridSpec& grid() const { return grid_; }
  std::size_t n_dof() const;

  // Binary container, little-endian:
  //   "PROMRM1" | u32 version | u32 grid kind | u32 n_u | u32 n_v
  //   box lower[4], upper[4] (f64) | u64 M | parameters M x 4
  //   u32 field count, then per field:
  //     name | u64 L | u64 N_dof | u64 n_sigma | modes N_dof x L | sigma
  //     u32 approximant tag | f64 epsilon, length_scale, jitter | u32 k
  //     centers M x 4 | values M x L | mean L
  //   u32 CRC32
  void save(const std::filesystem::path& path) const;
  static RomModel load(const std::filesystem::path& path);

 private:
  std::vector<FieldRom> fields_;
  ParameterBox box_;
  Eigen::MatrixXd parameters_;
  GridSpec grid_;
};

inline constexpr std::uint32_t kRomVersion = 1;

/// Per-snapshot relative L2 error |s_hat - s| / |s| (absolute error when s = 0).
double relative_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

struct CvResult {
  std::string field;
  ApproxMethod method;
  double mean_error;
};

/// k-fold cross-validation over consecutive folds (the first M mod k folds
/// hold one extra snapshot). Each fold gets a fresh POD and approximant; the
/// result is the mean per-snapshot relative L2 error over all M snapshots.
/// One row per (field, method), fields outermost.
std::vector<CvResult> kfold_cv(const SnapshotDataset& ds, const std::vector<ApproxConfig>& methods,
                               int k, const TruncationRule& truncation,
                               const ParameterBox& box = ParameterBox::standard(),
                               const std::vector<std::string>& fields = {});

/// Fold boundaries [begin, end) for M snapshots in k consecutive folds.
std::vector<std::pair<std::size_t, std::size_t>> consecutive_folds(std::size_t m, int k);

}  // namespace propopt
