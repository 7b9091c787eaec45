#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "propopt/optimizer.hpp"
#include "propopt/pipeline.hpp"
#include "propopt/rom_core.hpp"
#include "propopt/snapshot_oracle.hpp"

namespace propopt::cli {

inline constexpr const char* kConfigEnv = "PROPOPT_CONFIG";

/// Everything a pipeline run needs. Loaded from one JSON document; command
/// line flags override individual keys afterwards. See README for the schema.
struct PipelineConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out_dir = ".";

  // empty blade path -> synthetic baseline; empty dataset/rom -> out_dir defaults
  std::filesystem::path blade;
  std::filesystem::path dataset;
  std::filesystem::path rom;

  OperatingPoint op;
  GridSpec lattice{GridKind::lattice, 100, 100};
  GridSpec quadrature{GridKind::quadrature, 30, 30};
  GridKind dataset_grid = GridKind::lattice;
  SamplingPlan sampling;

  TruncationRule truncation;
  ApproxConfig method = ApproxConfig::rbf();
  std::map<std::string, ApproxConfig> per_field;
  int cv_folds = 10;

  std::string ga_preset = "fast";
  GaConfig ga = GaConfig::fast();
  GradConfig grad;
  PenaltySettings penalties;

  std::filesystem::path dataset_path() const { return dataset.empty() ? out_dir / "dataset.bin" : dataset; }
  std::filesystem::path rom_path() const { return rom.empty() ? out_dir / "rom.bin" : rom; }
  GridSpec grid_for(GridKind kind) const { return kind == GridKind::lattice ? lattice : quadrature; }
  RomConfig rom_config() const;
  BladeDefinition load_blade() const;
};

/// Parse a config document; unknown keys are rejected. Throws InvalidInput.
PipelineConfig parse_config(const std::string& json_text, const std::string& source = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

ApproxConfig approx_config_from_string(const std::string& method);

}  // namespace propopt::cli
