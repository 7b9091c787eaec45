#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "propopt/blade_file.hpp"
#include "propopt/errors.hpp"

namespace propopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_output(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << "\n";
}

json mu_json(const DeformationParams& mu) {
  return {{"pitch", mu.pitch}, {"camber", mu.camber}, {"chord", mu.chord}, {"thickness", mu.thickness}};
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw InvalidInput(std::string(what) + " not found: " + path.string());
}

void print_blade_summary(std::ostream& out, const BladeDefinition& blade) {
  out << "section,radius_fraction,radius,pitch,chord,max_thickness,max_camber\n";
  for (std::size_t k = 0; k < blade.sections.size(); ++k) {
    const auto& s = blade.sections[k];
    double t = 0.0, c = 0.0;
    for (const auto& p : s.thickness) t = std::max(t, p.value);
    for (const auto& p : s.camber) c = std::max(c, std::abs(p.value));
    out << k << ',' << s.radius_fraction << ',' << s.radius_fraction * blade.tip_radius << ',' << s.pitch << ','
        << s.chord << ',' << t << ',' << c << '\n';
  }
  const auto grid = gauss_quadrature_grid(BladeSurface(blade), 30, 30);
  out << "\nface_area,back_area\n"
      << quadrature_area(grid, Side::face) << ',' << quadrature_area(grid, Side::back) << '\n';
}

std::shared_ptr<const RomModel> load_rom(const PipelineConfig& cfg) {
  const fs::path path = cfg.rom_path();
  require_file(path, "ROM file");
  return std::make_shared<const RomModel>(RomModel::load(path));
}

// Evaluator from the ROM (default) or from the oracle on the configured grid.
EfficiencyEvaluator make_evaluator(const PipelineConfig& cfg, const BladeDefinition& blade, bool oracle,
                                   const std::string& method) {
  if (oracle) {
    const EvalPath path = method.empty() ? EvalPath::standard : eval_path_from_string(method);
    return EfficiencyEvaluator::oracle(blade, cfg.op, cfg.grid_for(grid_kind_for(path)));
  }
  auto rom = load_rom(cfg);
  if (!method.empty() && grid_kind_for(eval_path_from_string(method)) != rom->grid().kind) {
    throw InvalidInput("ROM " + cfg.rom_path().string() + " was trained on a " +
                       (rom->grid().kind == GridKind::lattice ? "lattice (standard)" : "quadrature (fast)") +
                       " grid; --method " + method + " needs the other kind");
  }
  return EfficiencyEvaluator::rom(blade, cfg.op, std::move(rom));
}

// The oracle counterpart of a ROM evaluator: same path and grid.
EfficiencyEvaluator oracle_twin(const PipelineConfig& cfg, const BladeDefinition& blade,
                                const EfficiencyEvaluator& e) {
  return EfficiencyEvaluator::oracle(blade, cfg.op, e.grid(), e.box());
}

const char* source_name(const EfficiencyEvaluator& e) { return e.uses_rom() ? "rom" : "oracle"; }

}  // namespace

DeformationParams parse_mu(const std::string& text) {
  std::array<double, 4> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t end = text.find(',', pos);
    const bool last = i == 3;
    if (last != (end == std::string::npos)) throw InvalidInput("--mu expects four comma-separated numbers, got '" + text + "'");
    const std::string item = text.substr(pos, last ? std::string::npos : end - pos);
    const char* first = item.data();
    const char* stop = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, stop, v[i]);
    if (ec != std::errc() || ptr != stop || item.empty()) {
      throw InvalidInput("--mu component '" + item + "' is not a number");
    }
    pos = end + 1;
  }
  return DeformationParams::from_array(v);
}

int run_blade(const PipelineConfig& cfg, const BladeOptions& opt) {
  BladeDefinition blade = cfg.load_blade();
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (opt.action == "deform") {
    const DeformationParams mu = parse_mu(opt.mu);
    blade = deform_blade(blade, mu);
    const fs::path out = opt.output.empty() ? cfg.out_dir / "blade_deformed.def" : fs::path(opt.output);
    ensure_parent(out);
    write_blade(out, blade);
    std::cerr << "wrote " << out.string() << "\n";
  }
  print_blade_summary(std::cout, blade);
  return 0;
}

int run_dataset(const PipelineConfig& cfg, const DatasetOptions& opt) {
  const BladeDefinition blade = cfg.load_blade();
  SamplingPlan plan = cfg.sampling;
  plan.seed = cfg.seed;
  if (opt.plan == "corners") {
    plan.n_random = 0;
    plan.corners = true;
  } else if (opt.plan != "full") {
    throw InvalidInput("--plan must be full or corners");
  }
  GridKind kind = cfg.dataset_grid;
  if (opt.grid == "lattice") kind = GridKind::lattice;
  else if (opt.grid == "quadrature") kind = GridKind::quadrature;
  else if (!opt.grid.empty()) throw InvalidInput("--grid must be lattice or quadrature");

  const auto t0 = Clock::now();
  const SnapshotDataset ds = build_dataset(blade, plan, cfg.grid_for(kind), cfg.op, ParameterBox::standard(),
                                           cfg.threads);
  const fs::path out = opt.output.empty() ? cfg.dataset_path() : fs::path(opt.output);
  ensure_parent(out);
  save_dataset(ds, out);
  if (!opt.csv_dir.empty()) export_dataset_csv(ds, opt.csv_dir);
  std::cout << "M=" << ds.n_snapshots() << " N_dof=" << ds.n_dof() << " fields=" << ds.field_names.size()
            << " file=" << out.string() << "\n";
  std::cerr << "time_s=" << seconds_since(t0) << "\n";
  return 0;
}

int run_rom(const PipelineConfig& cfg, const RomOptions& opt) {
  require_file(cfg.dataset_path(), "dataset file");
  const SnapshotDataset ds = load_dataset(cfg.dataset_path());
  const auto t0 = Clock::now();
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);

  if (opt.action == "train") {
    RomConfig rc = cfg.rom_config();
    if (!opt.method.empty()) rc.method = approx_config_from_string(opt.method);
    const RomModel rom = RomModel::train(ds, rc);
    const fs::path out = opt.output.empty() ? cfg.rom_path() : fs::path(opt.output);
    ensure_parent(out);
    rom.save(out);
    std::cout << "field,rank,method,energy\n";
    for (const auto& f : rom.fields()) {
      const auto& s = f.basis.singular_values;
      const double captured = s.head(f.basis.rank()).squaredNorm() / s.squaredNorm();
      std::cout << f.name << ',' << f.basis.rank() << ',' << to_string(f.approximant.config().method) << ','
                << captured << '\n';
    }
  } else {
    const int folds = opt.folds > 0 ? opt.folds : cfg.cv_folds;
    const std::vector<ApproxConfig> methods{ApproxConfig::rbf(), ApproxConfig::gpr(), ApproxConfig::knr()};
    const auto rows = kfold_cv(ds, methods, folds, cfg.truncation);
    const fs::path out = opt.output.empty() ? cfg.out_dir / "cv_report.csv" : fs::path(opt.output);
    auto file = open_output(out);
    std::ostringstream table;
    table << std::setprecision(std::numeric_limits<double>::max_digits10);
    table << "field,method,mean_error,best\n";
    for (const auto& r : rows) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& o : rows) {
        if (o.field == r.field) best = std::min(best, o.mean_error);
      }
      table << r.field << ',' << to_string(r.method) << ',' << r.mean_error << ','
            << (r.mean_error == best ? 1 : 0) << '\n';
    }
    file << table.str();
    std::cout << table.str();
  }
  std::cerr << "time_s=" << seconds_since(t0) << "\n";
  return 0;
}

int run_predict(const PipelineConfig& cfg, const PredictOptions& opt) {
  const DeformationParams mu = parse_mu(opt.mu);
  const BladeDefinition blade = cfg.load_blade();
  const EfficiencyEvaluator eval = make_evaluator(cfg, blade, opt.oracle, opt.method);
  if (!eval.box().contains(mu)) std::cerr << "warning: mu lies outside the parameter box and is clipped\n";

  const auto t0 = Clock::now();
  const ForceResult f = eval.evaluate(mu);
  const double elapsed = seconds_since(t0);

  std::ostringstream row;
  row << std::setprecision(std::numeric_limits<double>::max_digits10);
  row << "mu_pitch,mu_camber,mu_chord,mu_thickness,T_ax,Q_ax,kT,kQ,eta,method,source\n";
  const DeformationParams m = eval.box().clip(mu);
  row << m.pitch << ',' << m.camber << ',' << m.chord << ',' << m.thickness << ',' << f.thrust_axial << ','
      << f.torque_axial << ',' << f.kt << ',' << f.kq << ',' << f.eta << ',' << to_string(eval.path()) << ','
      << source_name(eval) << '\n';
  std::cout << row.str();
  if (!opt.output.empty()) open_output(opt.output) << row.str();
  std::cerr << "time_s=" << elapsed << "\n";
  return 0;
}

int run_optimize(const PipelineConfig& cfg, const OptimizeOptions& opt) {
  const BladeDefinition blade = cfg.load_blade();
  const EfficiencyEvaluator eval = make_evaluator(cfg, blade, opt.oracle, "");
  const EfficiencyEvaluator oracle = oracle_twin(cfg, blade, eval);
  const auto t0 = Clock::now();

  const ForceResult reference = eval.evaluate(DeformationParams::identity());
  const ForceResult oracle_reference = oracle.evaluate(DeformationParams::identity());
  const PenaltySpec penalties = opt.constrained ? example_penalties(reference.kt, cfg.penalties) : PenaltySpec{};
  const std::string tag = opt.constrained ? "constrained" : "unconstrained";

  json summary{{"source", source_name(eval)},
               {"path", to_string(eval.path())},
               {"constrained", opt.constrained},
               {"seed", cfg.seed},
               {"eta_reference", reference.eta},
               {"kt_reference", reference.kt}};

  const auto finish = [&](const FitnessValue& best, const std::string& stem) {
    const ForceResult on_oracle = oracle.evaluate(best.mu);
    summary["best_mu"] = mu_json(best.mu);
    summary["fitness"] = best.fitness;
    summary["penalty"] = best.penalty;
    summary["eta"] = best.forces.eta;
    summary["kt"] = best.forces.kt;
    summary["kq"] = best.forces.kq;
    summary["delta"] = efficiency_gain(best.forces.eta, reference.eta);
    summary["eta_oracle"] = on_oracle.eta;
    summary["delta_oracle"] = efficiency_gain(on_oracle.eta, oracle_reference.eta);
    write_json(cfg.out_dir / (stem + "_summary.json"), summary);
    std::cout << summary.dump(2) << "\n";
  };

  if (opt.action == "ga") {
    GaConfig ga = opt.preset.empty() ? cfg.ga : GaConfig::preset(opt.preset);
    ga.seed = cfg.seed;
    ga.threads = cfg.threads;
    const std::string preset = opt.preset.empty() ? cfg.ga_preset : opt.preset;
    const OptResult res = ga_optimize(ga, make_fitness(eval, penalties));
    const std::string stem = "ga_" + preset + "_" + tag;
    auto hist = open_output(cfg.out_dir / (stem + "_history.csv"));
    hist << "generation,best_fitness,mean_fitness\n";
    for (const auto& h : res.history) hist << h.generation << ',' << h.best << ',' << h.mean << '\n';
    summary["preset"] = preset;
    summary["generations"] = ga.generations;
    summary["func_evals"] = res.func_evals;
    finish(evaluate_fitness(eval, res.best.genes, penalties), stem);
  } else {
    GradConfig gc = cfg.grad;
    if (!opt.grad_method.empty()) gc.method = grad_method_from_string(opt.grad_method);
    const DeformationParams x0 = parse_mu(opt.x0);
    const OptResult res = grad_optimize(gc, make_fitness(eval, penalties), x0);
    const FitnessValue best = evaluate_fitness(eval, res.best.genes, penalties);
    const std::string stem = "grad_" + opt.test + "_" + to_string(gc.method) + "_" + tag;
    auto table = open_output(cfg.out_dir / (stem + ".csv"));
    table << "test,method,x0_pitch,x0_camber,x0_chord,x0_thickness,func_evals,grad_evals,delta,"
             "pitch,camber,chord,thickness\n";
    const auto& g = best.mu;
    table << opt.test << ',' << to_string(gc.method) << ',' << x0.pitch << ',' << x0.camber << ',' << x0.chord
          << ',' << x0.thickness << ',' << res.func_evals << ',' << res.grad_evals << ','
          << efficiency_gain(best.forces.eta, reference.eta) << ',' << g.pitch << ',' << g.camber << ','
          << g.chord << ',' << g.thickness << '\n';
    summary["method"] = to_string(gc.method);
    summary["test"] = opt.test;
    summary["x0"] = mu_json(x0);
    summary["func_evals"] = res.func_evals;
    summary["grad_evals"] = res.grad_evals;
    summary["iterations"] = res.iterations;
    summary["initial_fitness"] = res.initial_fitness;
    summary["termination"] = res.message;
    finish(best, stem);
  }
  std::cerr << "time_s=" << seconds_since(t0) << "\n";
  return 0;
}

}  // namespace propopt::cli
