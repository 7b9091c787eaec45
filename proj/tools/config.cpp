#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "propopt/blade_file.hpp"
#include "propopt/errors.hpp"

namespace propopt::cli {

using nlohmann::json;

namespace {

// Reject keys the schema does not know; a typo should not silently fall
// back to a default.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidInput("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_grid(const json& obj, const char* key, GridSpec& g) {
  if (!obj.contains(key)) return;
  const json& j = obj.at(key);
  check_keys(j, {"n_u", "n_v"}, key);
  read(j, "n_u", g.n_u);
  read(j, "n_v", g.n_v);
  if (g.n_u < 2 || g.n_v < 2) throw InvalidInput(std::string(key) + " resolution must be at least 2 x 2");
}

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "lattice" || s == "standard") return GridKind::lattice;
  if (s == "quadrature" || s == "fast") return GridKind::quadrature;
  throw InvalidInput("unknown grid kind '" + s + "' (expected lattice or quadrature)");
}

}  // namespace

ApproxConfig approx_config_from_string(const std::string& method) {
  switch (approx_method_from_string(method)) {
    case ApproxMethod::rbf: return ApproxConfig::rbf();
    case ApproxMethod::gpr: return ApproxConfig::gpr();
    case ApproxMethod::knr: return ApproxConfig::knr();
  }
  throw InvalidInput("unknown approximation method");
}

RomConfig PipelineConfig::rom_config() const {
  RomConfig rc;
  rc.truncation = truncation;
  rc.method = method;
  rc.per_field = per_field;
  return rc;
}

BladeDefinition PipelineConfig::load_blade() const {
  if (blade.empty()) return synthetic_baseline_blade();
  if (!std::filesystem::exists(blade)) throw InvalidInput("blade file not found: " + blade.string());
  return read_blade(blade);
}

PipelineConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(source + ": " + e.what());
  }
  PipelineConfig c;
  try {
    check_keys(doc, {"seed", "threads", "out_dir", "paths", "operating_point", "lattice", "quadrature",
                     "dataset_grid", "sampling", "rom", "ga", "grad", "penalties"},
               source);
    read(doc, "seed", c.seed);
    read(doc, "threads", c.threads);
    if (doc.contains("out_dir")) c.out_dir = doc.at("out_dir").get<std::string>();
    if (doc.contains("paths")) {
      const json& p = doc.at("paths");
      check_keys(p, {"blade", "dataset", "rom"}, "paths");
      if (p.contains("blade")) c.blade = p.at("blade").get<std::string>();
      if (p.contains("dataset")) c.dataset = p.at("dataset").get<std::string>();
      if (p.contains("rom")) c.rom = p.at("rom").get<std::string>();
    }
    if (doc.contains("operating_point")) {
      const json& o = doc.at("operating_point");
      check_keys(o, {"density", "viscosity", "revolutions", "advance_ratio", "diameter"}, "operating_point");
      read(o, "density", c.op.density);
      read(o, "viscosity", c.op.viscosity);
      read(o, "revolutions", c.op.revolutions);
      read(o, "advance_ratio", c.op.advance_ratio);
      read(o, "diameter", c.op.diameter);
    }
    read_grid(doc, "lattice", c.lattice);
    read_grid(doc, "quadrature", c.quadrature);
    if (doc.contains("dataset_grid")) c.dataset_grid = grid_kind_from_string(doc.at("dataset_grid").get<std::string>());
    if (doc.contains("sampling")) {
      const json& s = doc.at("sampling");
      check_keys(s, {"n_random", "corners"}, "sampling");
      read(s, "n_random", c.sampling.n_random);
      read(s, "corners", c.sampling.corners);
    }
    if (doc.contains("rom")) {
      const json& r = doc.at("rom");
      check_keys(r, {"energy", "rank", "method", "per_field", "cv_folds"}, "rom");
      if (r.contains("energy")) c.truncation = TruncationRule::energy_fraction(r.at("energy").get<double>());
      if (r.contains("rank")) c.truncation.rank = r.at("rank").get<int>();
      if (r.contains("method")) c.method = approx_config_from_string(r.at("method").get<std::string>());
      if (r.contains("per_field")) {
        for (const auto& [field, m] : r.at("per_field").items()) {
          c.per_field[field] = approx_config_from_string(m.get<std::string>());
        }
      }
      read(r, "cv_folds", c.cv_folds);
    }
    if (doc.contains("ga")) {
      const json& g = doc.at("ga");
      check_keys(g, {"preset", "population", "mu", "lambda", "cxpb", "mutpb", "indpb", "sigma", "generations"},
                 "ga");
      read(g, "preset", c.ga_preset);
      c.ga = GaConfig::preset(c.ga_preset);
      read(g, "population", c.ga.population);
      read(g, "mu", c.ga.mu);
      read(g, "lambda", c.ga.lambda);
      read(g, "cxpb", c.ga.cxpb);
      read(g, "mutpb", c.ga.mutpb);
      read(g, "indpb", c.ga.indpb);
      read(g, "sigma", c.ga.sigma);
      read(g, "generations", c.ga.generations);
      c.ga.validate();
    }
    if (doc.contains("grad")) {
      const json& g = doc.at("grad");
      check_keys(g, {"method", "fd_step", "gtol", "ftol", "max_iters"}, "grad");
      if (g.contains("method")) c.grad.method = grad_method_from_string(g.at("method").get<std::string>());
      read(g, "fd_step", c.grad.fd_step);
      read(g, "gtol", c.grad.gtol);
      read(g, "ftol", c.grad.ftol);
      read(g, "max_iters", c.grad.max_iters);
    }
    if (doc.contains("penalties")) {
      const json& p = doc.at("penalties");
      check_keys(p, {"min_thickness", "thickness_weight", "kt_tolerance", "kt_weight"}, "penalties");
      read(p, "min_thickness", c.penalties.min_thickness);
      read(p, "thickness_weight", c.penalties.thickness_weight);
      read(p, "kt_tolerance", c.penalties.kt_tolerance);
      read(p, "kt_weight", c.penalties.kt_weight);
    }
  } catch (const json::exception& e) {
    throw InvalidInput(source + ": " + e.what());
  } catch (const InvalidParameter& e) {
    throw InvalidInput(source + ": " + e.what());
  }
  if (c.threads < 1) throw InvalidInput(source + ": threads must be >= 1");
  if (c.cv_folds < 2) throw InvalidInput(source + ": rom.cv_folds must be >= 2");
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace propopt::cli
