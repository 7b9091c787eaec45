#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "propopt/blade_geometry.hpp"

namespace propopt {

using FitnessFn = std::function<double(const DeformationParams&)>;

struct Individual {
  DeformationParams genes;
  double fitness = 0.0;
};

/// (mu + lambda) settings. Offspring come from exactly one of crossover
/// (cxpb), mutation (mutpb) or reproduction, so cxpb + mutpb <= 1.
struct GaConfig {
  int population = 30;
  int mu = 5;
  int lambda = 10;
  double cxpb = 0.4;
  double mutpb = 0.5;
  double indpb = 0.5;
  double sigma = 0.1;
  int generations = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  ParameterBox box = ParameterBox::standard();

  static GaConfig standard() { return {}; }
  static GaConfig fast() {
    GaConfig c;
    c.population = 150;
    c.mu = 50;
    c.lambda = 80;
    c.indpb = 0.8;
    c.generations = 20;
    return c;
  }
  static GaConfig preset(const std::string& name);
  void validate() const;
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct OptResult {
  Individual best;
  std::vector<GenerationStats> history;  // generations + 1 rows for the GA
  std::size_t func_evals = 0;
  std::size_t grad_evals = 0;
  int iterations = 0;
  DeformationParams initial;
  double initial_fitness = 0.0;
  std::string message;
};

/// Cut point uniform in {1, 2, 3}; tails swapped; children clipped to the box.
std::pair<DeformationParams, DeformationParams> one_point_crossover(const DeformationParams& a,
                                                                    const DeformationParams& b,
                                                                    std::mt19937_64& rng,
                                                                    const ParameterBox& box);
/// Fixed-cut variant (cut in {1, 2, 3}).
std::pair<DeformationParams, DeformationParams> one_point_crossover_at(const DeformationParams& a,
                                                                       const DeformationParams& b,
                                                                       int cut, const ParameterBox& box);

/// Each gene, with probability indpb, is multiplied by a Normal(1, sigma^2)
/// draw; the result is clipped to the box.
DeformationParams gaussian_mutation(const DeformationParams& genes, double sigma, double indpb,
                                    std::mt19937_64& rng, const ParameterBox& box);

/// Maximize `fitness`. The initial population is drawn uniformly in the box;
/// each generation breeds lambda offspring from the current population and
/// keeps the mu best of parents and offspring. Fitness calls of one
/// generation may run on several threads; results do not depend on it.
OptResult ga_optimize(const GaConfig& config, const FitnessFn& fitness);

enum class GradMethod { cg, bounded_quasi_newton };

const char* to_string(GradMethod m);
GradMethod grad_method_from_string(const std::string& s);

struct GradConfig {
  GradMethod method = GradMethod::bounded_quasi_newton;
  double fd_step = 1e-3;  // central differences in box-normalized coordinates
  double gtol = 1e-6;     // projected-gradient infinity norm
  double ftol = 1e-12;    // relative decrease per iteration
  int max_iters = 100;
  ParameterBox box = ParameterBox::standard();
};

/// Maximize `fitness` from x0 (must lie in the box). Minimizes -fitness in
/// normalized coordinates; gradients by central differences (one-sided at
/// an active bound). Throws InvalidParameter for a non-finite start value.
OptResult grad_optimize(const GradConfig& config, const FitnessFn& fitness, const DeformationParams& x0);

}  // namespace propopt
