#include "propopt/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Core>

#include "propopt/errors.hpp"
#include "propopt/parallel.hpp"

namespace propopt {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// NaN fitness sorts last.
double rank_key(double f) { return std::isnan(f) ? -std::numeric_limits<double>::infinity() : f; }

}  // namespace

GaConfig GaConfig::preset(const std::string& name) {
  if (name == "standard") return standard();
  if (name == "fast") return fast();
  throw InvalidParameter("unknown GA preset '" + name + "' (expected standard or fast)");
}

void GaConfig::validate() const {
  if (population < 1 || mu < 1 || lambda < 1 || generations < 0) {
    throw InvalidParameter("GA sizes must be positive");
  }
  if (mu > population + lambda) throw InvalidParameter("mu exceeds population + lambda");
  for (double p : {cxpb, mutpb, indpb}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("GA probabilities must lie in [0, 1]");
  }
  if (cxpb + mutpb > 1.0) throw InvalidParameter("cxpb + mutpb must not exceed 1");
  if (!(sigma > 0.0)) throw InvalidParameter("mutation sigma must be positive");
}

std::pair<DeformationParams, DeformationParams> one_point_crossover_at(const DeformationParams& a,
                                                                       const DeformationParams& b,
                                                                       int cut, const ParameterBox& box) {
  if (cut < 1 || cut > 3) throw InvalidParameter("crossover cut must be 1, 2 or 3");
  auto x = a.to_array();
  auto y = b.to_array();
  for (int i = cut; i < 4; ++i) std::swap(x[i], y[i]);
  return {box.clip(DeformationParams::from_array(x)), box.clip(DeformationParams::from_array(y))};
}

std::pair<DeformationParams, DeformationParams> one_point_crossover(const DeformationParams& a,
                                                                    const DeformationParams& b,
                                                                    std::mt19937_64& rng,
                                                                    const ParameterBox& box) {
  std::uniform_int_distribution<int> cut(1, 3);
  return one_point_crossover_at(a, b, cut(rng), box);
}

DeformationParams gaussian_mutation(const DeformationParams& genes, double sigma, double indpb,
                                    std::mt19937_64& rng, const ParameterBox& box) {
  if (!(sigma > 0.0)) throw InvalidParameter("mutation sigma must be positive");
  if (!(indpb >= 0.0 && indpb <= 1.0)) throw InvalidParameter("indpb must lie in [0, 1]");
  std::normal_distribution<double> factor(1.0, sigma);
  auto x = genes.to_array();
  for (auto& g : x) {
    if (uniform01(rng) < indpb) g *= factor(rng);
  }
  return box.clip(DeformationParams::from_array(x));
}

OptResult ga_optimize(const GaConfig& config, const FitnessFn& fitness) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const ParameterBox& box = config.box;

  OptResult result;
  const auto evaluate = [&](std::vector<Individual>& inds, const std::vector<std::size_t>& todo) {
    parallel_for(todo.size(), config.threads, [&](std::size_t k) {
      auto& ind = inds[todo[k]];
      ind.fitness = fitness(ind.genes);
    });
    result.func_evals += todo.size();
  };
  const auto record = [&](int gen, const std::vector<Individual>& pop) {
    GenerationStats s{gen, -std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& ind : pop) {
      s.best = std::max(s.best, rank_key(ind.fitness));
      s.mean += ind.fitness;
    }
    s.mean /= static_cast<double>(pop.size());
    result.history.push_back(s);
  };

  std::vector<Individual> pop(static_cast<std::size_t>(config.population));
  for (auto& ind : pop) {
    std::array<double, 4> unit{};
    for (auto& x : unit) x = uniform01(rng);
    ind.genes = box.from_unit(unit);
  }
  {
    std::vector<std::size_t> all(pop.size());
    std::iota(all.begin(), all.end(), 0);
    evaluate(pop, all);
  }
  record(0, pop);

  for (int gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> offspring;
    std::vector<std::size_t> todo;
    offspring.reserve(static_cast<std::size_t>(config.lambda));
    for (int k = 0; k < config.lambda; ++k) {
      const double r = uniform01(rng);
      std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
      if (r < config.cxpb && pop.size() >= 2) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        while (j == i) j = pick(rng);
        offspring.push_back({one_point_crossover(pop[i].genes, pop[j].genes, rng, box).first, 0.0});
        todo.push_back(offspring.size() - 1);
      } else if (r < config.cxpb + config.mutpb) {
        const auto& parent = pop[pick(rng)];
        offspring.push_back({gaussian_mutation(parent.genes, config.sigma, config.indpb, rng, box), 0.0});
        todo.push_back(offspring.size() - 1);
      } else {
        offspring.push_back(pop[pick(rng)]);
      }
    }
    evaluate(offspring, todo);

    // parents first so ties keep the older individual
    pop.insert(pop.end(), offspring.begin(), offspring.end());
    std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
      return rank_key(a.fitness) > rank_key(b.fitness);
    });
    pop.resize(static_cast<std::size_t>(std::min<int>(config.mu, static_cast<int>(pop.size()))));
    record(gen, pop);
  }

  result.best = *std::max_element(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
    return rank_key(a.fitness) < rank_key(b.fitness);
  });
  result.iterations = config.generations;
  result.message = "completed " + std::to_string(config.generations) + " generations";
  return result;
}

const char* to_string(GradMethod m) {
  return m == GradMethod::cg ? "cg" : "bounded-quasi-newton";
}

GradMethod grad_method_from_string(const std::string& s) {
  if (s == "cg") return GradMethod::cg;
  if (s == "bounded-quasi-newton" || s == "qn" || s == "l-bfgs-b") return GradMethod::bounded_quasi_newton;
  throw InvalidParameter("unknown gradient method '" + s + "' (expected cg or bounded-quasi-newton)");
}

namespace {

using Vec4 = Eigen::Vector4d;

// -fitness over the unit cube, with call counting.
class Objective {
 public:
  Objective(const FitnessFn& fitness, const ParameterBox& box, double fd_step)
      : fitness_(fitness), box_(box), h_(fd_step) {}

  double value(const Vec4& z) {
    ++evals;
    const std::array<double, 4> u{z[0], z[1], z[2], z[3]};
    return -fitness_(box_.from_unit(u));
  }

  Vec4 gradient(const Vec4& z) {
    ++grads;
    Vec4 g;
    for (int i = 0; i < 4; ++i) {
      Vec4 zp = z, zm = z;
      zp[i] = std::min(z[i] + h_, 1.0);
      zm[i] = std::max(z[i] - h_, 0.0);
      g[i] = (value(zp) - value(zm)) / (zp[i] - zm[i]);
    }
    return g;
  }

  std::size_t evals = 0;
  std::size_t grads = 0;

 private:
  const FitnessFn& fitness_;
  const ParameterBox& box_;
  double h_;
};

Vec4 project(const Vec4& z) { return z.cwiseMax(0.0).cwiseMin(1.0); }

double projected_gradient_norm(const Vec4& z, const Vec4& g) {
  return (z - project(z - g)).cwiseAbs().maxCoeff();
}

// Components sitting on a bound with the gradient pushing outward.
std::array<bool, 4> active_set(const Vec4& z, const Vec4& g) {
  std::array<bool, 4> a{};
  for (int i = 0; i < 4; ++i) a[i] = (z[i] <= 0.0 && g[i] > 0.0) || (z[i] >= 1.0 && g[i] < 0.0);
  return a;
}

}  // namespace

OptResult grad_optimize(const GradConfig& config, const FitnessFn& fitness, const DeformationParams& x0) {
  if (!config.box.contains(x0, 1e-12)) throw InvalidParameter("initial point lies outside the parameter box");
  if (!(config.fd_step > 0.0 && config.fd_step < 0.5)) throw InvalidParameter("fd_step must lie in (0, 0.5)");
  if (config.max_iters < 0) throw InvalidParameter("max_iters must be non-negative");

  Objective obj(fitness, config.box, config.fd_step);
  const auto unit = config.box.to_unit(x0);
  Vec4 z = project(Vec4(unit[0], unit[1], unit[2], unit[3]));
  double f = obj.value(z);
  if (!std::isfinite(f)) throw InvalidParameter("fitness is not finite at the initial point");

  OptResult result;
  result.initial = x0;
  result.initial_fitness = -f;
  Vec4 g = obj.gradient(z);
  Eigen::Matrix4d h_inv = Eigen::Matrix4d::Identity();
  bool fresh_h = true;
  Vec4 d_prev = Vec4::Zero();
  Vec4 g_prev = g;
  result.message = "reached max_iters";

  for (int it = 0; it < config.max_iters; ++it) {
    if (projected_gradient_norm(z, g) < config.gtol) {
      result.message = "projected gradient below gtol";
      break;
    }
    const auto active = active_set(z, g);
    Vec4 d;
    if (config.method == GradMethod::bounded_quasi_newton) {
      Eigen::Matrix4d h = h_inv;
      for (int i = 0; i < 4; ++i) {
        if (!active[i]) continue;
        h.row(i).setZero();
        h.col(i).setZero();
      }
      d = -h * g;
    } else {
      // Polak-Ribiere+, restarted every 4 iterations
      double beta = 0.0;
      if (it % 4 != 0 && g_prev.squaredNorm() > 0.0) {
        beta = std::max(0.0, g.dot(g - g_prev) / g_prev.squaredNorm());
      }
      d = -g + beta * d_prev;
      for (int i = 0; i < 4; ++i) {
        if (active[i]) d[i] = 0.0;
      }
    }
    if (!(g.dot(d) < 0.0)) {
      h_inv.setIdentity();
      fresh_h = true;
      d = -g;
      for (int i = 0; i < 4; ++i) {
        if (active[i]) d[i] = 0.0;
      }
    }
    // keep trial steps within one box width
    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax > 1.0) d /= dmax;

    double t = 1.0;
    bool accepted = false;
    Vec4 z_new;
    double f_new = f;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      z_new = project(z + t * d);
      if ((z_new - z).cwiseAbs().maxCoeff() == 0.0) break;
      f_new = obj.value(z_new);
      if (std::isfinite(f_new) && f_new < f && f_new <= f + 1e-4 * g.dot(z_new - z)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.message = "line search found no decrease";
      break;
    }
    if (config.method == GradMethod::cg) {
      // CG needs near-exact steps: one quadratic-interpolation refinement
      const double gd = g.dot(d);
      const double curv = f_new - f - gd * t;
      if (curv > 0.0) {
        const double t_star = std::min(-gd * t * t / (2.0 * curv), 16.0 * t);
        const Vec4 z_try = project(z + t_star * d);
        if (std::abs(t_star - t) > 1e-3 * t && (z_try - z_new).cwiseAbs().maxCoeff() > 0.0) {
          const double f_try = obj.value(z_try);
          if (std::isfinite(f_try) && f_try < f_new) {
            z_new = z_try;
            f_new = f_try;
          }
        }
      }
    }

    const Vec4 g_new = obj.gradient(z_new);
    const Vec4 s = z_new - z;
    const Vec4 y = g_new - g;
    const double sy = s.dot(y);
    if (config.method == GradMethod::bounded_quasi_newton && sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_h) h_inv = Eigen::Matrix4d::Identity() * (sy / y.squaredNorm());  // Shanno-Phua scaling
      fresh_h = false;
      const double rho = 1.0 / sy;
      const Eigen::Matrix4d v = Eigen::Matrix4d::Identity() - rho * s * y.transpose();
      h_inv = v * h_inv * v.transpose() + rho * s * s.transpose();
    }
    const double reduction = (f - f_new) / std::max({std::abs(f), std::abs(f_new), 1.0});
    d_prev = d;
    g_prev = g;
    z = z_new;
    f = f_new;
    g = g_new;
    result.iterations = it + 1;
    if (reduction <= config.ftol) {
      result.message = "relative reduction below ftol";
      break;
    }
  }

  const std::array<double, 4> zu{z[0], z[1], z[2], z[3]};
  result.best = {config.box.from_unit(zu), -f};
  if (result.iterations == 0) result.best.genes = x0;  // bit-exact start point
  result.func_evals = obj.evals;
  result.grad_evals = obj.grads;
  return result;
}

}  // namespace propopt
