#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace propopt::cli {

struct BladeOptions {
  std::string action;  // show | deform
  std::string mu;
  std::string output;
};

struct DatasetOptions {
  std::string plan = "full";  // full | corners
  std::string grid;           // lattice | quadrature (default from config)
  std::string output;
  std::string csv_dir;
};

struct RomOptions {
  std::string action;  // train | validate
  std::string output;
  std::string method;
  int folds = 0;
};

struct PredictOptions {
  std::string mu;
  std::string method;  // standard | fast; default follows the ROM
  bool oracle = false;
  std::string output;
};

struct OptimizeOptions {
  std::string action;  // ga | grad
  std::string preset;
  bool constrained = false;
  bool oracle = false;
  std::string grad_method;
  std::string x0 = "1,1,1,1";
  std::string test = "run";
};

/// Parse "a,b,c,d" into deformation factors. Throws InvalidInput.
DeformationParams parse_mu(const std::string& text);

int run_blade(const PipelineConfig& cfg, const BladeOptions& opt);
int run_dataset(const PipelineConfig& cfg, const DatasetOptions& opt);
int run_rom(const PipelineConfig& cfg, const RomOptions& opt);
int run_predict(const PipelineConfig& cfg, const PredictOptions& opt);
int run_optimize(const PipelineConfig& cfg, const OptimizeOptions& opt);

}  // namespace propopt::cli
