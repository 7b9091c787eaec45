// propopt: propeller shape-optimization pipeline driver.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "propopt/errors.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace propopt;
  using namespace propopt::cli;

  CLI::App app{"Propeller blade shape optimization with POD reduced-order models"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  app.add_option("--config", config_path, std::string("JSON config file (default: $") + kConfigEnv + ")");
  app.add_option("--seed", seed, "Seed for every randomized stage");
  app.add_option("--out-dir", out_dir, "Directory for generated files");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  BladeOptions blade;
  auto* blade_cmd = app.add_subcommand("blade", "Inspect or deform a blade definition");
  blade_cmd->require_subcommand(1);
  blade_cmd->add_subcommand("show", "Print the section summary and face areas")
      ->callback([&] { blade.action = "show"; });
  auto* deform = blade_cmd->add_subcommand("deform", "Write a deformed blade file and its summary");
  deform->add_option("--mu", blade.mu, "pitch,camber,chord,thickness factors")->required();
  deform->add_option("--output", blade.output, "Output blade file (default <out-dir>/blade_deformed.def)");
  deform->callback([&] { blade.action = "deform"; });

  DatasetOptions dataset;
  auto* dataset_cmd = app.add_subcommand("dataset", "Snapshot datasets");
  dataset_cmd->require_subcommand(1);
  auto* generate = dataset_cmd->add_subcommand("generate", "Evaluate the oracle over the sampling plan");
  generate->add_option("--plan", dataset.plan, "full (random + corners) or corners")
      ->check(CLI::IsMember({"full", "corners"}));
  generate->add_option("--grid", dataset.grid, "lattice (standard path) or quadrature (fast path)")
      ->check(CLI::IsMember({"lattice", "quadrature"}));
  generate->add_option("--output", dataset.output, "Dataset file");
  generate->add_option("--csv-dir", dataset.csv_dir, "Also export CSV tables to this directory");

  RomOptions rom;
  auto* rom_cmd = app.add_subcommand("rom", "Train or cross-validate reduced-order models");
  rom_cmd->require_subcommand(1);
  auto* train = rom_cmd->add_subcommand("train", "Fit POD + approximant per field");
  train->add_option("--output", rom.output, "ROM file");
  train->add_option("--method", rom.method, "rbf, gpr or knr")->check(CLI::IsMember({"rbf", "gpr", "knr"}));
  train->callback([&] { rom.action = "train"; });
  auto* validate = rom_cmd->add_subcommand("validate", "k-fold cross-validation of rbf, gpr and knr");
  validate->add_option("--folds", rom.folds, "Number of consecutive folds")->check(CLI::Range(2, 1 << 20));
  validate->add_option("--output", rom.output, "CV report CSV (default <out-dir>/cv_report.csv)");
  validate->callback([&] { rom.action = "validate"; });

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Thrust, torque and efficiency of one design");
  predict_cmd->add_option("--mu", predict.mu, "pitch,camber,chord,thickness factors")->required();
  predict_cmd->add_option("--method", predict.method, "standard or fast")
      ->check(CLI::IsMember({"standard", "fast"}));
  predict_cmd->add_flag("--oracle", predict.oracle, "Use oracle fields instead of the ROM");
  predict_cmd->add_option("--output", predict.output, "Also write the force report row to this CSV");

  OptimizeOptions optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "Maximize the (penalized) efficiency");
  optimize_cmd->require_subcommand(1);
  auto* ga = optimize_cmd->add_subcommand("ga", "(mu + lambda) genetic algorithm");
  ga->add_option("--preset", optimize.preset, "standard or fast")->check(CLI::IsMember({"standard", "fast"}));
  ga->add_flag("--constrained", optimize.constrained, "Apply the example penalty set");
  ga->add_flag("--oracle", optimize.oracle, "Optimize the oracle pipeline instead of the ROM");
  ga->callback([&] { optimize.action = "ga"; });
  auto* grad = optimize_cmd->add_subcommand("grad", "Finite-difference gradient optimizer");
  grad->add_option("--method", optimize.grad_method, "cg or bounded-quasi-newton")
      ->check(CLI::IsMember({"cg", "bounded-quasi-newton"}));
  grad->add_option("--x0", optimize.x0, "Initial guess pitch,camber,chord,thickness");
  grad->add_option("--test", optimize.test, "Label for the report row");
  grad->add_flag("--constrained", optimize.constrained, "Apply the example penalty set");
  grad->add_flag("--oracle", optimize.oracle, "Optimize the oracle pipeline instead of the ROM");
  grad->callback([&] { optimize.action = "grad"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env && *env) config_path = env;
    }
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (threads) cfg.threads = *threads;

    if (app.got_subcommand(blade_cmd)) return run_blade(cfg, blade);
    if (app.got_subcommand(dataset_cmd)) return run_dataset(cfg, dataset);
    if (app.got_subcommand(rom_cmd)) return run_rom(cfg, rom);
    if (app.got_subcommand(predict_cmd)) return run_predict(cfg, predict);
    if (app.got_subcommand(optimize_cmd)) return run_optimize(cfg, optimize);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
  return kUsageError;
}
