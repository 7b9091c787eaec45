#include "propopt/rom_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "propopt/binary_io.hpp"
#include "propopt/errors.hpp"

namespace propopt {

namespace {

constexpr double kMaxCondition = 1e14;

Eigen::Matrix<double, Eigen::Dynamic, 4> normalize(const Eigen::MatrixXd& params,
                                                   const ParameterBox& box) {
  Eigen::Matrix<double, Eigen::Dynamic, 4> out(params.rows(), 4);
  for (Eigen::Index i = 0; i < params.rows(); ++i) {
    for (int j = 0; j < 4; ++j) {
      out(i, j) = (params(i, j) - box.lower[j]) / (box.upper[j] - box.lower[j]);
    }
  }
  return out;
}

Eigen::RowVector4d normalize(const DeformationParams& mu, const ParameterBox& box) {
  const auto u = box.to_unit(mu);
  return {u[0], u[1], u[2], u[3]};
}

}  // namespace

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const TruncationRule& rule) {
  if (snapshots.size() == 0) throw InvalidInput("POD of an empty snapshot matrix");
  const Eigen::Index max_rank = std::min(snapshots.rows(), snapshots.cols());
  if (rule.rank > max_rank) throw InvalidInput("POD rank exceeds min(N_dof, M)");
  if (rule.rank <= 0 && !(rule.energy > 0.0 && rule.energy <= 1.0)) {
    throw InvalidInput("POD energy fraction must lie in (0, 1]");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
  PodBasis basis;
  basis.singular_values = svd.singularValues();

  Eigen::Index rank = rule.rank;
  if (rank <= 0) {
    const Eigen::VectorXd energy = basis.singular_values.array().square();
    const double total = energy.sum();
    rank = 1;
    if (total > 0.0) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < energy.size(); ++i) {
        acc += energy[i];
        rank = i + 1;
        if (acc >= rule.energy * total) break;
      }
    }
  }
  basis.modes = svd.matrixU().leftCols(rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    auto col = basis.modes.col(c);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > 1e-12) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
  return basis;
}

Eigen::MatrixXd project(const Eigen::MatrixXd& snapshots, const PodBasis& basis) {
  if (snapshots.rows() != basis.modes.rows()) {
    throw InvalidInput("snapshot rows differ from POD mode length");
  }
  return basis.modes.transpose() * snapshots;
}

const char* to_string(ApproxMethod m) {
  switch (m) {
    case ApproxMethod::rbf: return "rbf";
    case ApproxMethod::gpr: return "gpr";
    case ApproxMethod::knr: return "knr";
  }
  return "?";
}

ApproxMethod approx_method_from_string(const std::string& s) {
  if (s == "rbf") return ApproxMethod::rbf;
  if (s == "gpr") return ApproxMethod::gpr;
  if (s == "knr") return ApproxMethod::knr;
  throw InvalidInput("unknown approximation method '" + s + "' (rbf, gpr, knr)");
}

Eigen::VectorXd Approximant::kernel_row(const Eigen::RowVector4d& x) const {
  const Eigen::Index m = centers_.rows();
  Eigen::VectorXd row(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d2 = (centers_.row(i) - x).squaredNorm();
    if (config_.method == ApproxMethod::rbf) {
      row[i] = std::sqrt(1.0 + config_.epsilon * config_.epsilon * d2);
    } else {
      row[i] = std::exp(-0.5 * d2 / (config_.length_scale * config_.length_scale));
    }
  }
  return row;
}

Approximant Approximant::fit(const Eigen::MatrixXd& params, const Eigen::MatrixXd& coeffs,
                             const ApproxConfig& config, const ParameterBox& box) {
  const Eigen::Index m = params.rows();
  if (params.cols() != 4) throw InvalidInput("parameter matrix must have 4 columns");
  if (coeffs.cols() != m) throw InvalidInput("coefficient columns differ from parameter rows");

  Approximant a;
  a.config_ = config;
  a.box_ = box;
  a.centers_ = normalize(params, box);
  a.mean_ = Eigen::RowVectorXd::Zero(coeffs.rows());
  const Eigen::MatrixXd targets = coeffs.transpose();  // M x L

  switch (config.method) {
    case ApproxMethod::knr: {
      if (config.k < 1 || m < config.k) throw InvalidInput("KNR needs at least k training points");
      a.values_ = targets;
      return a;
    }
    case ApproxMethod::rbf: {
      if (m < 2) throw InvalidInput("RBF approximant needs at least 2 training points");
      if (!(config.epsilon > 0.0)) throw InvalidParameter("multiquadric epsilon must be positive");
      a.mean_ = targets.colwise().mean();
      break;
    }
    case ApproxMethod::gpr: {
      if (m < 2) throw InvalidInput("GPR approximant needs at least 2 training points");
      if (!(config.length_scale > 0.0) || config.jitter < 0.0) {
        throw InvalidParameter("GPR needs a positive length scale and non-negative jitter");
      }
      a.mean_ = targets.colwise().mean();
      break;
    }
  }

  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) k.col(i) = a.kernel_row(a.centers_.row(i));
  if (config.method == ApproxMethod::gpr) k.diagonal().array() += config.jitter;
  const Eigen::MatrixXd rhs = targets.rowwise() - a.mean_;

  if (config.method == ApproxMethod::gpr) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1.0 / kMaxCondition)) {
      throw SingularSystem("GPR covariance matrix is singular or not positive definite");
    }
    a.values_ = ldlt.solve(rhs);
  } else {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
    if (!(lu.rcond() > 1.0 / kMaxCondition)) {
      throw SingularSystem("multiquadric interpolation matrix is singular (duplicate parameters?)");
    }
    a.values_ = lu.solve(rhs);
  }
  return a;
}

Eigen::VectorXd Approximant::predict(const DeformationParams& mu) const {
  const Eigen::RowVector4d x = normalize(mu, box_);
  if (config_.method == ApproxMethod::knr) {
    const Eigen::Index m = centers_.rows();
    std::vector<std::pair<double, Eigen::Index>> d(m);
    for (Eigen::Index i = 0; i < m; ++i) d[i] = {(centers_.row(i) - x).squaredNorm(), i};
    std::partial_sort(d.begin(), d.begin() + config_.k, d.end());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(values_.cols());
    for (int j = 0; j < config_.k; ++j) acc += values_.row(d[j].second);
    return (acc / config_.k).transpose();
  }
  return (kernel_row(x).transpose() * values_ + mean_).transpose();
}

ApproxConfig RomConfig::method_for(const std::string& field) const {
  const auto it = per_field.find(field);
  return it == per_field.end() ? method : it->second;
}

RomModel RomModel::train(const SnapshotDataset& ds, const RomConfig& config) {
  ds.validate();
  RomModel rom;
  rom.box_ = config.box;
  rom.parameters_ = ds.parameters;
  rom.grid_ = ds.grid;
  for (std::size_t f = 0; f < ds.fields.size(); ++f) {
    FieldRom fr;
    fr.name = ds.field_names[f];
    fr.basis = compute_pod(ds.fields[f], config.truncation);
    fr.approximant =
        Approximant::fit(ds.parameters, project(ds.fields[f], fr.basis), config.method_for(fr.name), config.box);
    rom.fields_.push_back(std::move(fr));
  }
  return rom;
}

RomModel::Prediction RomModel::predict(const DeformationParams& mu) const {
  Prediction p;
  for (double x : mu.to_array()) {
    if (!std::isfinite(x)) throw InvalidParameter("ROM prediction needs finite parameters");
  }
  p.out_of_box = !box_.contains(mu);
  p.fields.reserve(fields_.size());
  for (const auto& f : fields_) p.fields.push_back(f.basis.modes * f.approximant.predict(mu));
  return p;
}

Eigen::VectorXd RomModel::predict_field(const std::string& name, const DeformationParams& mu) const {
  const auto& f = field(name);
  return f.basis.modes * f.approximant.predict(mu);
}

std::vector<std::string> RomModel::field_names() const {
  std::vector<std::string> names;
  for (const auto& f : fields_) names.push_back(f.name);
  return names;
}

const FieldRom& RomModel::field(const std::string& name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return f;
  }
  throw InvalidInput("ROM has no field '" + name + "'");
}

std::size_t RomModel::n_dof() const {
  return fields_.empty() ? 0 : static_cast<std::size_t>(fields_[0].basis.modes.rows());
}

void RomModel::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.put_magic("PROMRM1");
  w.put_u32(kRomVersion);
  w.put_u32(static_cast<std::uint32_t>(grid_.kind));
  w.put_u32(static_cast<std::uint32_t>(grid_.n_u));
  w.put_u32(static_cast<std::uint32_t>(grid_.n_v));
  w.put_f64s(box_.lower);
  w.put_f64s(box_.upper);
  w.put_u64(static_cast<std::uint64_t>(parameters_.rows()));
  for (Eigen::Index i = 0; i < parameters_.rows(); ++i)
    for (int j = 0; j < 4; ++j) w.put_f64(parameters_(i, j));
  w.put_u32(static_cast<std::uint32_t>(fields_.size()));
  for (const auto& f : fields_) {
    const auto& U = f.basis.modes;
    const auto& a = f.approximant;
    w.put_string(f.name);
    w.put_u64(static_cast<std::uint64_t>(U.cols()));
    w.put_u64(static_cast<std::uint64_t>(U.rows()));
    w.put_u64(static_cast<std::uint64_t>(f.basis.singular_values.size()));
    for (Eigen::Index i = 0; i < U.rows(); ++i)
      for (Eigen::Index j = 0; j < U.cols(); ++j) w.put_f64(U(i, j));
    for (Eigen::Index i = 0; i < f.basis.singular_values.size(); ++i) w.put_f64(f.basis.singular_values[i]);
    w.put_u32(static_cast<std::uint32_t>(a.config_.method));
    w.put_f64(a.config_.epsilon);
    w.put_f64(a.config_.length_scale);
    w.put_f64(a.config_.jitter);
    w.put_u32(static_cast<std::uint32_t>(a.config_.k));
    for (Eigen::Index i = 0; i < a.centers_.rows(); ++i)
      for (int j = 0; j < 4; ++j) w.put_f64(a.centers_(i, j));
    for (Eigen::Index i = 0; i < a.values_.rows(); ++i)
      for (Eigen::Index j = 0; j < a.values_.cols(); ++j) w.put_f64(a.values_(i, j));
    for (Eigen::Index j = 0; j < a.mean_.size(); ++j) w.put_f64(a.mean_[j]);
  }
  w.put_crc32();
  w.write_file(path);
}

RomModel RomModel::load(const std::filesystem::path& path) {
  auto r = ByteReader::from_file(path);
  r.expect_magic("PROMRM1");
  const std::uint32_t version = r.get_u32();
  if (version != kRomVersion) throw UnsupportedVersion("unsupported ROM version " + std::to_string(version));
  r.verify_and_strip_crc32();

  RomModel rom;
  const std::uint32_t kind = r.get_u32();
  if (kind > 1) throw FormatError("unknown grid kind");
  rom.grid_.kind = static_cast<GridKind>(kind);
  rom.grid_.n_u = static_cast<int>(r.get_u32());
  rom.grid_.n_v = static_cast<int>(r.get_u32());
  for (auto& x : rom.box_.lower) x = r.get_f64();
  for (auto& x : rom.box_.upper) x = r.get_f64();
  const std::uint64_t m = r.get_u64();
  if (m > r.remaining() / 32) throw FormatError("implausible snapshot count");
  rom.parameters_.resize(static_cast<Eigen::Index>(m), 4);
  for (std::uint64_t i = 0; i < m; ++i)
    for (int j = 0; j < 4; ++j) rom.parameters_(i, j) = r.get_f64();
  const std::uint32_t nf = r.get_u32();
  for (std::uint32_t f = 0; f < nf; ++f) {
    FieldRom fr;
    fr.name = r.get_string();
    const std::uint64_t l = r.get_u64();
    const std::uint64_t n = r.get_u64();
    const std::uint64_t ns = r.get_u64();
    if (l == 0 || l > ns || n * l > r.remaining() / 8) throw FormatError("implausible ROM dimensions");
    fr.basis.modes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < l; ++j) fr.basis.modes(i, j) = r.get_f64();
    const auto sv = r.get_f64s(ns);
    fr.basis.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(ns));
    auto& a = fr.approximant;
    const std::uint32_t tag = r.get_u32();
    if (tag > 2) throw FormatError("unknown approximant tag");
    a.config_.method = static_cast<ApproxMethod>(tag);
    a.config_.epsilon = r.get_f64();
    a.config_.length_scale = r.get_f64();
    a.config_.jitter = r.get_f64();
    a.config_.k = static_cast<int>(r.get_u32());
    a.box_ = rom.box_;
    a.centers_.resize(static_cast<Eigen::Index>(m), 4);
    for (std::uint64_t i = 0; i < m; ++i)
      for (int j = 0; j < 4; ++j) a.centers_(i, j) = r.get_f64();
    a.values_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
    for (std::uint64_t i = 0; i < m; ++i)
      for (std::uint64_t j = 0; j < l; ++j) a.values_(i, j) = r.get_f64();
    a.mean_.resize(static_cast<Eigen::Index>(l));
    for (std::uint64_t j = 0; j < l; ++j) a.mean_[j] = r.get_f64();
    rom.fields_.push_back(std::move(fr));
  }
  if (!r.at_end()) throw FormatError("trailing bytes in ROM file");
  return rom;
}

double relative_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  const double diff = (predicted - truth).norm();
  const double norm = truth.norm();
  return norm > 0.0 ? diff / norm : diff;
}

std::vector<std::pair<std::size_t, std::size_t>> consecutive_folds(std::size_t m, int k) {
  if (k < 2) throw InvalidInput("cross-validation needs k >= 2");
  if (static_cast<std::size_t>(k) > m) throw InvalidInput("cross-validation fold count exceeds snapshot count");
  std::vector<std::pair<std::size_t, std::size_t>> folds;
  const std::size_t base = m / k, extra = m % k;
  std::size_t begin = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    folds.emplace_back(begin, begin + size);
    begin += size;
  }
  return folds;
}

std::vector<CvResult> kfold_cv(const SnapshotDataset& ds, const std::vector<ApproxConfig>& methods,
                               int k, const TruncationRule& truncation, const ParameterBox& box,
                               const std::vector<std::string>& fields) {
  ds.validate();
  const std::size_t m = ds.n_snapshots();
  const auto folds = consecutive_folds(m, k);
  const auto& names = fields.empty() ? ds.field_names : fields;

  std::vector<CvResult> results;
  for (const auto& name : names) {
    const Eigen::MatrixXd& s = ds.field(name);
    std::vector<double> total(methods.size(), 0.0);
    for (const auto& [begin, end] : folds) {
      const Eigen::Index n_test = static_cast<Eigen::Index>(end - begin);
      const Eigen::Index n_train = static_cast<Eigen::Index>(m) - n_test;
      Eigen::MatrixXd s_train(s.rows(), n_train);
      Eigen::MatrixXd p_train(n_train, 4);
      Eigen::Index c = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j >= begin && j < end) continue;
        s_train.col(c) = s.col(static_cast<Eigen::Index>(j));
        p_train.row(c) = ds.parameters.row(static_cast<Eigen::Index>(j));
        ++c;
      }
      const PodBasis basis = compute_pod(s_train, truncation);
      const Eigen::MatrixXd coeffs = project(s_train, basis);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const Approximant approx = Approximant::fit(p_train, coeffs, methods[mi], box);
        for (std::size_t j = begin; j < end; ++j) {
          const Eigen::VectorXd pred = basis.modes * approx.predict(ds.parameter(j));
          total[mi] += relative_error(pred, s.col(static_cast<Eigen::Index>(j)));
        }
      }
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      results.push_back({name, methods[mi].method, total[mi] / static_cast<double>(m)});
    }
  }
  return results;
}

}  // namespace propopt
