#include "edfm/errors.hpp"
#include "edfm/io/config.hpp"
#include "edfm/io/runner.hpp"
#include "edfm/io/vtk.hpp"
#include "edfm/units.hpp"
#include "edfm/validation/demo.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace edfm;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = EDFM_SOURCE_DIR "/configs";

std::string read_file(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& yaml)
{
  try {
    io::parse_config_string(yaml, "t.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name)
{
  const auto d = fs::temp_directory_path() / ("edfm_io_" + name);
  fs::remove_all(d);
  return d;
}

/// 2x2x1 box with one vertical fracture, an injector in it and a producer.
std::string small_coupled(const fs::path& out)
{
  return R"(
kind: coupled
name: small
grid:
  cells: [2, 2, 1]
  extent: [2, 2, 1]
fractures:
  - name: main
    center: [1.1, 0.95, 0.5]
    length: 3
    height: 2
    strike: 30
    dip: 90
    conductivity: 50
mechanics:
  young_modulus: 1000
  poisson_ratio: 0.25
  biot: 0.8
flow:
  permeability: 10
  porosity: 0.2
  compressibility: 1.0e-3
initial:
  stress: [-20, -18, -30]
  pressure: 5
boundary:
  - {side: xmin, displacement: {x: 0}}
  - {side: ymin, displacement: {y: 0}}
  - {side: zmin, displacement: {z: 0}}
  - {side: xmax, far_field: true}
  - {side: ymax, far_field: true}
  - {side: zmax, far_field: true}
wells:
  - {name: INJ, control: rate, value: 0.5, location: [1.1, 0.95], fractures: [main]}
  - {name: PROD, control: bhp, value: 5, location: [0.2, 1.8]}
schedule:
  end: 2
  dt_initial: 0.5
  dt_max: 1
  report_days: [1]
output:
  directory: )" + out.string() + "\n";
}

}  // namespace

TEST_CASE("shipped shear scenario carries the tabulated mechanics")
{
  const auto c = io::parse_config(kConfigs / "shear.yaml");
  CHECK(c.kind == io::ScenarioKind::mech_validation);
  CHECK(c.mech_case.kind == validation::MechCase::shear);
  CHECK(c.mech_case.props.young == doctest::Approx(1e9));
  CHECK(c.mech_case.props.poisson == 0.25);
  CHECK(c.mech_case.props.friction == 0.6);
  CHECK(c.mech_case.props.dilation == 0.0);
  CHECK(c.mech_case.props.cohesion == 0.0);
  CHECK(c.mech_case.props.hardening == 0.0);
  CHECK(c.mech_case.load == doctest::Approx(10e6));
  CHECK(c.mech_case.n_fracture_cells == std::vector<int>{4, 8, 16, 32});
}

TEST_CASE("shipped opening and flow scenarios parse")
{
  const auto s = io::parse_config(kConfigs / "sneddon.yaml");
  CHECK(s.mech_case.kind == validation::MechCase::opening);
  CHECK(s.mech_case.n_fracture_cells.size() == 5);
  const auto f = io::parse_config(kConfigs / "flow.yaml");
  CHECK(f.kind == io::ScenarioKind::flow_validation);
  CHECK(f.flow_case.props.permeability.x() == doctest::Approx(10.0 * units::millidarcy));
  CHECK(f.flow_case.spacings == std::vector<double>{4, 2, 1, 0.5});
  const auto d = io::parse_config(kConfigs / "demo_coupled.yaml");
  CHECK(d.kind == io::ScenarioKind::coupled);
  CHECK(d.fractures.size() == 9);
  CHECK(d.wells.size() == 5);
}

TEST_CASE("shipped nine-fracture scenario matches the built-in demo")
{
  const auto file = io::make_model_input(io::parse_config(kConfigs / "demo_coupled.yaml"));
  const auto demo = validation::build_demo_input(validation::DemoConfig{});
  CHECK(file.grid.nx() == demo.grid.nx());
  CHECK(file.grid.ny() == demo.grid.ny());
  CHECK(file.grid.nz() == demo.grid.nz());
  for (int a = 0; a < 3; ++a) {
    CHECK(file.grid.coords(a).front() == demo.grid.coords(a).front());
    CHECK(file.grid.coords(a).back() == demo.grid.coords(a).back());
  }
  REQUIRE(file.fractures.size() == demo.fractures.size());
  for (std::size_t i = 0; i < demo.fractures.size(); ++i) {
    INFO("fracture " << i + 1);
    const auto& a = file.fractures[i];
    const auto& b = demo.fractures[i];
    CHECK((a.center - b.center).norm() < 1e-9);
    CHECK((a.normal - b.normal).norm() < 1e-12);
    CHECK(a.length == b.length);
    CHECK(a.height == doctest::Approx(b.height).epsilon(1e-7));
    CHECK(a.conductivity == b.conductivity);
    CHECK(a.aperture == b.aperture);
  }
  CHECK(file.mech.young == doctest::Approx(demo.mech.young));
  CHECK(file.mech.poisson == demo.mech.poisson);
  CHECK(file.mech.friction == demo.mech.friction);
  CHECK(file.flow.permeability.x() == doctest::Approx(demo.flow.permeability.x()));
  CHECK(file.flow.porosity == demo.flow.porosity);
  CHECK(file.flow.compressibility == doctest::Approx(demo.flow.compressibility));
  CHECK(file.flow.viscosity == doctest::Approx(demo.flow.viscosity));
  CHECK(file.initial_pressure == doctest::Approx(demo.initial_pressure));
  for (int c = 0; c < 6; ++c) CHECK(file.initial_stress[c] == doctest::Approx(demo.initial_stress[c]));
  REQUIRE(file.wells.size() == demo.wells.size());
  for (std::size_t i = 0; i < demo.wells.size(); ++i) {
    INFO("well " << demo.wells[i].name);
    CHECK(file.wells[i].name == demo.wells[i].name);
    CHECK(file.wells[i].control == demo.wells[i].control);
    CHECK(file.wells[i].value == doctest::Approx(demo.wells[i].value));
    CHECK((file.wells[i].location - demo.wells[i].location).head<2>().norm() < 1e-12);
    CHECK(file.wells[i].fractures == demo.wells[i].fractures);
  }
  CHECK(file.bc.faces.size() == demo.bc.faces.size());
}

TEST_CASE("missing Young's modulus is reported by name and line")
{
  const auto msg = error_of("kind: mech_validation\ncase: shear\nmechanics:\n  poisson_ratio: 0.25\n");
  CHECK(msg.find("mechanics.young_modulus") != std::string::npos);
  CHECK(msg.find("t.yaml:4") != std::string::npos);
}

TEST_CASE("invalid values and unknown keys are rejected")
{
  const std::string base = small_coupled("out");
  auto with = [&](const std::string& from, const std::string& to) {
    auto s = base;
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
  };
  CHECK(error_of(base).empty());
  CHECK(error_of(with("porosity: 0.2", "porosity: -0.2")).find("porosity") != std::string::npos);
  const auto unknown = error_of(with("porosity: 0.2", "porosity: 0.2\n  porosty: 0.3"));
  CHECK(unknown.find("unknown key 'flow.porosty'") != std::string::npos);
  CHECK(unknown.find("t.yaml:22") != std::string::npos);
  CHECK(error_of(with("fractures: [main]", "fractures: [other]")).find("unknown fracture 'other'") !=
        std::string::npos);
  CHECK(error_of(with("side: xmin", "side: west")).find("unknown side") != std::string::npos);
  CHECK(error_of(with("cells: [2, 2, 1]", "cells: [2, 0, 1]")).find("grid.cells") != std::string::npos);
  CHECK(error_of(with("young_modulus: 1000", "young_modulus: abc")).find("must be a number") != std::string::npos);
  CHECK(!error_of("a: [1, 2").empty());
}

TEST_CASE("coupled scenario converts units once")
{
  const auto c = io::parse_config_string(small_coupled("out"));
  CHECK(c.mech.young == doctest::Approx(1e9));
  CHECK(c.flow.biot == 0.8);
  CHECK(c.flow.compressibility == doctest::Approx(1e-9));
  CHECK(c.initial_stress[2] == doctest::Approx(-30e6));
  CHECK(c.initial_pressure == doctest::Approx(5e6));
  CHECK(c.fractures[0].aperture == doctest::Approx(1e-3));
  REQUIRE(c.wells.size() == 2);
  CHECK(c.wells[0].value == doctest::Approx(0.5 / units::day));
  CHECK(c.wells[0].fractures == std::vector<int>{0});
  CHECK(c.wells[1].value == doctest::Approx(5e6));
  CHECK(c.schedule.end_time == doctest::Approx(2 * units::day));
  CHECK(c.bc.faces.size() == 6);
  CHECK(c.bc.faces[0].displacement[0].has_value());
  CHECK(!c.bc.faces[0].displacement[1].has_value());
}

TEST_CASE("one-cell grid VTK has 8 points and one hexahedron, and reparses")
{
  const auto grid = mesh::StructuredGrid::uniform({1, 1, 1}, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
  linalg::Vector u(24);
  for (int i = 0; i < 24; ++i) u[i] = 1e-3 * (i + 1) / 7.0;
  const std::vector<double> p{1.234567890123e7};
  const std::vector<double> div{-3.5e-5};
  const auto path = scratch("vtk") / "grid.vtk";
  io::write_grid_vtk(grid, u, p, div, path);

  std::ifstream in(path);
  std::string tok;
  int points = -1;
  int cells = -1;
  std::vector<double> disp;
  double pm = 0.0;
  double dv = 0.0;
  std::string type;
  while (in >> tok) {
    if (tok == "POINTS") in >> points >> tok;
    if (tok == "CELLS") {
      int size = 0;
      in >> cells >> size;
      CHECK(size == 9);
    }
    if (tok == "CELL_TYPES") in >> tok >> type;
    if (tok == "p_matrix") in >> tok >> tok >> tok >> tok >> pm;
    if (tok == "div_u") in >> tok >> tok >> tok >> tok >> dv;
    if (tok == "displacement") {
      in >> tok;
      double v;
      for (int i = 0; i < 24 && in >> v; ++i) disp.push_back(v);
    }
  }
  CHECK(points == 8);
  CHECK(cells == 1);
  CHECK(type == "12");
  CHECK(pm == p[0]);
  CHECK(dv == div[0]);
  REQUIRE(disp.size() == 24);
  for (int i = 0; i < 24; ++i) CHECK(disp[static_cast<std::size_t>(i)] == u[i]);
}

TEST_CASE("status codes follow the contact-state enum")
{
  CHECK(static_cast<int>(mechanics::FractureStatus::stick) == 0);
  CHECK(static_cast<int>(mechanics::FractureStatus::slip) == 1);
  CHECK(static_cast<int>(mechanics::FractureStatus::open) == 2);
}

TEST_CASE("snapshot tags")
{
  CHECK(io::snapshot_tag(27.0 * units::day) == "day_027");
  CHECK(io::snapshot_tag(0.0) == "day_000");
  CHECK(io::snapshot_tag(2.5 * units::day) == "day_002.50");
}

TEST_CASE("coupled scenario output is byte-for-byte reproducible")
{
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const auto log = io::run_coupled_scenario(io::parse_config_string(small_coupled(a)));
  io::run_coupled_scenario(io::parse_config_string(small_coupled(b)));
  REQUIRE(!log.empty());
  CHECK(log.back().time == doctest::Approx(2 * units::day));
  for (const char* f : {"run_log.csv", "day_001_fractures.csv", "day_002_fractures.csv", "day_002_grid.vtk",
                        "day_002_fracture1.vtk"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(read_file(a / f) == read_file(b / f));
  }
  const auto csv = read_file(a / "day_002_fractures.csv");
  CHECK(csv.rfind("fracture,cv,arc_m,status", 0) == 0);
}

TEST_CASE("unwritable output path raises")
{
  const auto grid = mesh::StructuredGrid::uniform({1, 1, 1}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  const auto blocker = scratch("blocker");
  std::ofstream(blocker.string()) << "x";
  CHECK_THROWS(io::write_grid_vtk(grid, linalg::Vector(), {}, {}, blocker / "sub" / "g.vtk"));
}
