#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "propopt/blade_geometry.hpp"
#include "propopt/hydro_forces.hpp"
#include "propopt/optimizer.hpp"
#include "propopt/rom_core.hpp"
#include "propopt/snapshot_oracle.hpp"

namespace propopt {

/// standard: deformed lattice -> triangulation -> fields at the vertices,
///           averaged to the centroids -> discrete sums.
/// fast:     quadrature nodes -> area-weighted normals and fields at the
///           nodes -> Gauss sums.
enum class EvalPath { standard, fast };

const char* to_string(EvalPath p);
EvalPath eval_path_from_string(const std::string& s);
GridKind grid_kind_for(EvalPath p);

/// Efficiency of a deformed propeller, with surface fields taken from the
/// oracle or from a trained ROM. Parameters are clipped to the box before
/// evaluation. Immutable and safe to share between threads.
class EfficiencyEvaluator {
 public:
  /// Oracle fields on `grid` (lattice for the standard path, quadrature for
  /// the fast path).
  static EfficiencyEvaluator oracle(const BladeDefinition& baseline, const OperatingPoint& op,
                                    const GridSpec& grid, const ParameterBox& box = ParameterBox::standard());
  /// ROM fields; the path follows the grid the ROM was trained on.
  static EfficiencyEvaluator rom(const BladeDefinition& baseline, const OperatingPoint& op,
                                 std::shared_ptr<const RomModel> model);

  ForceResult evaluate(const DeformationParams& mu) const;

  EvalPath path() const { return path_; }
  bool uses_rom() const { return rom_ != nullptr; }
  const GridSpec& grid() const { return grid_; }
  const ParameterBox& box() const { return box_; }
  const OperatingPoint& operating_point() const { return op_; }

 private:
  EfficiencyEvaluator(const BladeDefinition& baseline, const OperatingPoint& op, const GridSpec& grid,
                      const ParameterBox& box);

  BladeDefinition baseline_;
  OperatingPoint op_;
  GridSpec grid_;
  ParameterBox box_;
  EvalPath path_;
  std::shared_ptr<const FieldOracle> oracle_;
  std::shared_ptr<const RomModel> rom_;
};

/// One constraint: a non-negative violation measure and its weight.
struct Penalty {
  std::string name;
  std::function<double(const DeformationParams&, const ForceResult&)> violation;
  double weight = 0.0;
};

using PenaltySpec = std::vector<Penalty>;

struct PenaltySettings {
  double min_thickness = 0.9;   // hinge max(0, min_thickness - mu_t)
  double thickness_weight = 10.0;
  double kt_tolerance = 0.05;   // hinge on |kT - kT_ref| / kT_ref - tolerance
  double kt_weight = 5.0;
};

/// The shipped example constraint set: a minimum thickness factor and a
/// band around the reference thrust coefficient.
PenaltySpec example_penalties(double kt_reference, const PenaltySettings& settings = {});

struct FitnessValue {
  DeformationParams mu;  // clipped
  ForceResult forces;
  double penalty = 0.0;  // sum of weight * violation
  double fitness = 0.0;  // eta - penalty
};

FitnessValue evaluate_fitness(const EfficiencyEvaluator& evaluator, const DeformationParams& mu,
                              const PenaltySpec& penalties = {});

FitnessFn make_fitness(const EfficiencyEvaluator& evaluator, const PenaltySpec& penalties = {});

/// Relative efficiency change eta / eta_ref - 1.
double efficiency_gain(double eta, double eta_reference);

}  // namespace propopt
