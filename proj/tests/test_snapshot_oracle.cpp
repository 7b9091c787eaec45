#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "propopt/errors.hpp"
#include "propopt/snapshot_oracle.hpp"

using namespace propopt;

namespace {

constexpr double kPi = std::numbers::pi;

// Hand evaluation of the pressure law at a chord station of the baseline
// (where the normalized camber and thickness are exact table values).
double reference_pressure(double u, double r, int side, const DeformationParams& mu, double cbar, double tbar) {
  const double n = 15.0, u0 = 0.85 * 15.0 * 1.0;
  const double beta = std::atan(u0 / (2 * kPi * n * r));
  const double phi = std::atan(mu.pitch * 1.0 / (2 * kPi * r));
  const double v2 = u0 * u0 + std::pow(2 * kPi * n * r, 2);
  const double l = 4 * u * (1 - u);
  return 0.5 * v2 * (side * (2 * kPi * (phi - beta) + 4 * mu.camber * cbar) * l - mu.thickness * tbar * l);
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("operating point") {
  OperatingPoint op;
  CHECK(op.inflow_speed() == doctest::Approx(12.75).epsilon(1e-15));
  CHECK(op.density == 998.2);
  op.revolutions = 0.0;
  CHECK_THROWS_AS(op.validate(), InvalidParameter);
}

TEST_CASE("pressure law matches a hand evaluation") {
  const auto b = synthetic_baseline_blade();
  const FieldOracle oracle(b, OperatingPoint{});
  const double r = b.sections[2].radius_fraction * b.tip_radius;
  const double u = 0.3;
  const double cbar = 0.02 * 4 * 0.3 * 0.7, tbar = 0.06;
  for (const DeformationParams mu : {DeformationParams{}, DeformationParams{1.07, 0.85, 1.2, 0.75}}) {
    for (int side : {-1, 1}) {
      CHECK(oracle.pressure(u, r, side, mu) ==
            doctest::Approx(reference_pressure(u, r, side, mu, cbar, tbar)).epsilon(1e-12));
    }
  }
}

TEST_CASE("shear law matches a hand evaluation") {
  const auto b = synthetic_baseline_blade();
  const FieldOracle oracle(b, OperatingPoint{});
  const double rf = b.sections[4].radius_fraction, r = rf * b.tip_radius;
  const double c = 0.25 * (1.1 - rf);
  const double u0 = 12.75, wr = 2 * kPi * 15 * r;
  const double speed = std::sqrt(u0 * u0 + wr * wr);
  const DeformationParams mu{1, 1, 0.8, 1};
  const double u = 0.4;
  const double expected = 0.0296 * std::pow(1e-6, 0.2) * std::pow(speed, 1.8) * std::pow(u * 0.8 * c + 0.01 * c, -0.2);
  const Vec3 t = Vec3(1, 2, 2) / 3.0;
  const Vec3 s = oracle.shear(u, r, t, mu);
  CHECK(s.norm() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s.normalized().dot(t) == doctest::Approx(1.0));
}

TEST_CASE("edge values, zero-incidence cancellation and invalid radius") {
  const auto b = synthetic_baseline_blade();
  const FieldOracle oracle(b, OperatingPoint{});
  for (double u : {0.0, 1.0}) {
    CHECK(oracle.pressure(u, 0.3, 1, {}) == 0.0);
    CHECK(std::isfinite(oracle.shear(u, 0.3, Vec3::UnitX(), {}).norm()));
  }
  // zero camber and thickness; pitch factor so that phi = beta at r
  auto flat = b;
  for (auto& s : flat.sections) {
    for (auto& p : s.camber) p.value = 0.0;
    for (auto& p : s.thickness) p.value = 0.0;
  }
  const FieldOracle flat_oracle(flat, OperatingPoint{});
  const double r = 0.25;
  const double mu_p = 12.75 / 15.0;  // mu_p P / (2 pi r) = u0 / (2 pi n r) with P = D = 1
  CHECK(std::abs(flat_oracle.pressure(0.4, r, 1, {mu_p, 1, 1, 1})) < 1e-12);
  // zero thickness: face and back are antisymmetric
  for (double u : {0.2, 0.5, 0.8}) {
    CHECK(flat_oracle.pressure(u, 0.31, 1, {}) == doctest::Approx(-flat_oracle.pressure(u, 0.31, -1, {})));
  }
  CHECK_THROWS_AS(oracle.pressure(0.5, 0.0, 1, {}), InvalidInput);
  CHECK_THROWS_AS(oracle.shear(0.5, -0.1, Vec3::UnitX(), {}), InvalidInput);
}

TEST_CASE("oracle is deterministic and Lipschitz in mu") {
  const auto b = synthetic_baseline_blade();
  const FieldOracle oracle(b, OperatingPoint{});
  const auto grid = gauss_quadrature_grid(BladeSurface(b), 6, 6);
  const DeformationParams mu{1.02, 0.9, 1.1, 1.05};
  const auto a = oracle.evaluate(grid, mu);
  const auto c = oracle.evaluate(grid, mu);
  CHECK(a.pressure == c.pressure);
  const double h = 1e-4;
  for (int k = 0; k < 4; ++k) {
    auto arr = mu.to_array();
    arr[k] += h;
    const auto d = oracle.evaluate(grid, DeformationParams::from_array(arr));
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      worst = std::max(worst, std::abs(d.pressure[i] - a.pressure[i]));
      worst = std::max(worst, (d.shear[i] - a.shear[i]).norm());
    }
    CHECK(worst <= 1e4 * h);  // |dp/dmu| is O(V^2) ~ 1e3 at the tip
  }
}

TEST_CASE("sampling plan") {
  const auto box = ParameterBox::standard();
  SUBCASE("corners only") {
    const auto rows = sample_parameters({0, true, 1}, box);
    REQUIRE(rows.size() == 16);
    std::set<std::array<double, 4>> seen;
    for (const auto& r : rows) {
      const auto a = r.to_array();
      for (int i = 0; i < 4; ++i) CHECK((a[i] == box.lower[i] || a[i] == box.upper[i]));
      seen.insert(a);
    }
    CHECK(seen.size() == 16);
    CHECK(rows[5].to_array() == std::array<double, 4>{1.1, 0.8, 1.3, 0.7});  // bits 0 and 2
  }
  SUBCASE("full plan") {
    const auto rows = sample_parameters({200, true, 42}, box);
    CHECK(rows.size() == 216);
    for (const auto& r : rows) CHECK(box.contains(r));
    const auto again = sample_parameters({200, true, 42}, box);
    CHECK(rows == again);
    CHECK_FALSE(rows == sample_parameters({200, true, 43}, box));
  }
}

TEST_CASE("dataset build, layout and persistence") {
  const auto b = synthetic_baseline_blade();
  const GridSpec grid{GridKind::quadrature, 5, 4};
  const SamplingPlan plan{6, true, 7};
  const auto ds = build_dataset(b, plan, grid, OperatingPoint{}, ParameterBox::standard(), 3);
  CHECK(ds.n_snapshots() == 22);
  CHECK(ds.n_dof() == 2 * 6 * 5 * 4);
  CHECK(ds.field_names == std::vector<std::string>{"pressure", "shear_x", "shear_y", "shear_z", "normal_x",
                                                   "normal_y", "normal_z"});
  CHECK_NOTHROW(ds.validate());

  // columns follow parameter rows regardless of thread count
  const auto serial = build_dataset(b, plan, grid, OperatingPoint{}, ParameterBox::standard(), 1);
  for (std::size_t f = 0; f < ds.fields.size(); ++f) CHECK(ds.fields[f] == serial.fields[f]);
  const FieldOracle oracle(b, OperatingPoint{});
  const auto cols = snapshot_columns(b, oracle, grid, ds.parameter(9));
  CHECK(cols[0] == ds.field("pressure").col(9));
  CHECK(cols[6] == ds.field("normal_z").col(9));

  const auto path = temp_file("propopt_ds_test.bin");
  save_dataset(ds, path);
  const auto back = load_dataset(path);
  CHECK(back.parameters == ds.parameters);
  CHECK(back.field_names == ds.field_names);
  for (std::size_t f = 0; f < ds.fields.size(); ++f) CHECK(back.fields[f] == ds.fields[f]);
  CHECK(back.plan.seed == 7);
  CHECK(back.grid.kind == GridKind::quadrature);
  CHECK(back.grid.n_u == 5);

  // byte-identical when saved again
  const auto path2 = temp_file("propopt_ds_test2.bin");
  save_dataset(back, path2);
  std::ifstream a(path, std::ios::binary), c(path2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sc((std::istreambuf_iterator<char>(c)), {});
  CHECK(sa == sc);
  CHECK(sa.substr(0, 7) == "PROMDS1");

  SUBCASE("truncated file") {
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
    CHECK_THROWS_AS(load_dataset(path), FormatError);
  }
  SUBCASE("corrupted payload") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    f.put('\x7f');
    f.close();
    CHECK_THROWS_AS(load_dataset(path), FormatError);
  }
  SUBCASE("version mismatch") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(7);
    f.put('\x02');
    f.close();
    CHECK_THROWS_AS(load_dataset(path), UnsupportedVersion);
  }
  SUBCASE("CSV export") {
    const auto dir = temp_file("propopt_ds_csv");
    export_dataset_csv(ds, dir);
    CHECK(std::filesystem::exists(dir / "parameters.csv"));
    CHECK(std::filesystem::exists(dir / "pressure.csv"));
    std::filesystem::remove_all(dir);
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("lattice datasets carry four fields") {
  const auto ds = build_dataset(synthetic_baseline_blade(), {0, true, 0}, {GridKind::lattice, 4, 3}, OperatingPoint{});
  CHECK(ds.field_names.size() == 4);
  CHECK(ds.n_snapshots() == 16);
  CHECK(ds.n_dof() == 2 * 6 * 12);
}
