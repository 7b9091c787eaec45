#include "propopt/pipeline.hpp"

#include <cmath>

#include "propopt/errors.hpp"

namespace propopt {

const char* to_string(EvalPath p) { return p == EvalPath::standard ? "standard" : "fast"; }

EvalPath eval_path_from_string(const std::string& s) {
  if (s == "standard") return EvalPath::standard;
  if (s == "fast") return EvalPath::fast;
  throw InvalidParameter("unknown evaluation path '" + s + "' (expected standard or fast)");
}

GridKind grid_kind_for(EvalPath p) { return p == EvalPath::standard ? GridKind::lattice : GridKind::quadrature; }

EfficiencyEvaluator::EfficiencyEvaluator(const BladeDefinition& baseline, const OperatingPoint& op,
                                         const GridSpec& grid, const ParameterBox& box)
    : baseline_(baseline),
      op_(op),
      grid_(grid),
      box_(box),
      path_(grid.kind == GridKind::lattice ? EvalPath::standard : EvalPath::fast) {
  baseline_.validate();
  op_.validate();
  if (grid.n_u < 2 || grid.n_v < 2) throw InvalidParameter("evaluation grid needs at least 2 x 2 points");
}

EfficiencyEvaluator EfficiencyEvaluator::oracle(const BladeDefinition& baseline, const OperatingPoint& op,
                                                const GridSpec& grid, const ParameterBox& box) {
  EfficiencyEvaluator e(baseline, op, grid, box);
  e.oracle_ = std::make_shared<const FieldOracle>(baseline, op);
  return e;
}

EfficiencyEvaluator EfficiencyEvaluator::rom(const BladeDefinition& baseline, const OperatingPoint& op,
                                             std::shared_ptr<const RomModel> model) {
  if (!model) throw InvalidParameter("no ROM given");
  EfficiencyEvaluator e(baseline, op, model->grid(), model->box());
  const std::size_t expected = make_grid(BladeSurface(baseline), model->grid()).size();
  if (model->n_dof() != expected) {
    throw InvalidInput("ROM has " + std::to_string(model->n_dof()) + " degrees of freedom, the blade grid " +
                       std::to_string(expected));
  }
  for (const auto& name : dataset_field_names(model->grid().kind)) model->field(name);
  e.rom_ = std::move(model);
  return e;
}

ForceResult EfficiencyEvaluator::evaluate(const DeformationParams& mu_in) const {
  const DeformationParams mu = box_.clip(mu_in);
  const BladeSurface surface(deform_blade(baseline_, mu));
  const SurfaceGrid grid = make_grid(surface, grid_);
  const std::size_t n = grid.size();

  std::vector<double> pressure(n);
  std::vector<Vec3> shear(n);
  std::vector<Vec3> normals;
  if (rom_) {
    const auto p = rom_->predict_field("pressure", mu);
    const auto sx = rom_->predict_field("shear_x", mu);
    const auto sy = rom_->predict_field("shear_y", mu);
    const auto sz = rom_->predict_field("shear_z", mu);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      pressure[i] = p[k];
      shear[i] = Vec3(sx[k], sy[k], sz[k]);
    }
    if (path_ == EvalPath::fast) {
      const auto nx = rom_->predict_field("normal_x", mu);
      const auto ny = rom_->predict_field("normal_y", mu);
      const auto nz = rom_->predict_field("normal_z", mu);
      normals.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        normals[i] = Vec3(nx[k], ny[k], nz[k]);
      }
    }
  } else {
    auto snap = oracle_->evaluate(grid, mu);
    pressure = std::move(snap.pressure);
    shear = std::move(snap.shear);
    if (path_ == EvalPath::fast) normals = grid.normal;
  }

  ForcePrimitives prims;
  if (path_ == EvalPath::standard) {
    const TriangulatedSurface tri = triangulate(grid);
    prims = forces_standard(tri, to_centroids(tri, pressure), to_centroids(tri, shear), op_.density);
  } else {
    prims = forces_fast(grid.position, grid.weight, normals, pressure, shear, op_.density);
  }
  return make_force_result(prims, op_);
}

PenaltySpec example_penalties(double kt_reference, const PenaltySettings& s) {
  if (!(kt_reference != 0.0 && std::isfinite(kt_reference))) {
    throw InvalidParameter("reference thrust coefficient must be finite and nonzero");
  }
  PenaltySpec spec;
  spec.push_back({"min_thickness",
                  [t = s.min_thickness](const DeformationParams& mu, const ForceResult&) {
                    return std::max(0.0, t - mu.thickness);
                  },
                  s.thickness_weight});
  spec.push_back({"kt_band",
                  [kt_reference, tol = s.kt_tolerance](const DeformationParams&, const ForceResult& f) {
                    return std::max(0.0, std::abs(f.kt - kt_reference) / std::abs(kt_reference) - tol);
                  },
                  s.kt_weight});
  return spec;
}

FitnessValue evaluate_fitness(const EfficiencyEvaluator& evaluator, const DeformationParams& mu,
                              const PenaltySpec& penalties) {
  FitnessValue v;
  v.mu = evaluator.box().clip(mu);
  v.forces = evaluator.evaluate(v.mu);
  for (const auto& p : penalties) v.penalty += p.weight * p.violation(v.mu, v.forces);
  v.fitness = v.forces.eta - v.penalty;
  return v;
}

FitnessFn make_fitness(const EfficiencyEvaluator& evaluator, const PenaltySpec& penalties) {
  return [&evaluator, penalties](const DeformationParams& mu) {
    return evaluate_fitness(evaluator, mu, penalties).fitness;
  };
}

double efficiency_gain(double eta, double eta_reference) { return eta / eta_reference - 1.0; }

}  // namespace propopt
