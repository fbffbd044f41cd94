#include "edfm/errors.hpp"
#include "edfm/flow/flow.hpp"
#include "edfm/mesh/fracture_mesh.hpp"
#include "edfm/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace edfm;
using namespace edfm::flow;
using mesh::StructuredGrid;
using mesh::Vec3;

namespace {

constexpr double mD = units::millidarcy;
constexpr double MPa = units::megapascal;

FlowProps props_mD(double k)
{
  FlowProps p;
  p.permeability = Vec3::Constant(k * mD);
  p.porosity = 0.2;
  p.compressibility = 1e-3 * units::per_megapascal;
  p.viscosity = 1.0 * units::centipoise;
  p.bulk_modulus = 1000.0 * MPa;
  return p;
}

}  // namespace

TEST_CASE("matrix-matrix TPFA by hand")
{
  const auto g = StructuredGrid::uniform({2, 1, 1}, {2, 1, 1}, {0, 0, 0});
  const auto c = mm_transmissibility(g, Vec3::Constant(10 * mD));
  REQUIRE(c.size() == 1);
  CHECK(c[0].transmissibility / mD == doctest::Approx(10.0));
  const auto aniso = mm_transmissibility(g, Vec3(10 * mD, 1 * mD, 1 * mD));
  CHECK(aniso[0].transmissibility / mD == doctest::Approx(10.0));
  const auto zero = mm_transmissibility(g, Vec3(0.0, 1 * mD, 1 * mD));
  CHECK(zero[0].transmissibility == 0.0);
}

TEST_CASE("matrix-fracture transmissibility on the bisected unit cube")
{
  const auto g = StructuredGrid::uniform({1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  const auto cuts = mesh::embed_fracture(g, mesh::make_fracture(0, {0.5, 0.5, 0.5}, 5, 5, 90.0, 90.0));
  REQUIRE(cuts.size() == 1);
  CHECK(mf_transmissibility(cuts[0], Vec3::Constant(10 * mD)) / mD == doctest::Approx(80.0));
  CHECK(mf_transmissibility(cuts[0], Vec3(0.0, 10 * mD, 10 * mD)) < 1e-12 * 80 * mD);
  auto doubled = cuts[0];
  doubled.area *= 2.0;
  CHECK(mf_transmissibility(doubled, Vec3::Constant(10 * mD)) / mD == doctest::Approx(160.0));
  auto bad = cuts[0];
  bad.dbar = 0.0;
  CHECK_THROWS_AS(mf_transmissibility(bad, Vec3::Constant(mD)), GeometryError);
}

TEST_CASE("along-fracture transmissibility between square CVs")
{
  mesh::FractureCV a, b;
  a.centroid = {1, 0, 0};
  b.centroid = {3, 0, 0};
  mesh::CVAdjacency e;
  e.edge_length = 2.0;
  e.edge_midpoint = {2, 0, 0};
  e.edge_direction = {0, 0, 1};
  const Vec3 n(0, 1, 0);
  CHECK(ff_adjacent_transmissibility(a, b, e, n, 20.0, 20.0) == doctest::Approx(20.0));
  CHECK(ff_adjacent_transmissibility(b, a, e, n, 20.0, 20.0) == doctest::Approx(20.0));
  CHECK(ff_adjacent_transmissibility(a, b, e, n, 0.0, 0.0) == 0.0);
  CHECK(ff_adjacent_transmissibility(a, b, e, n, 20.0, 5.0) ==
        doctest::Approx(ff_adjacent_transmissibility(b, a, e, n, 5.0, 20.0)));
}

TEST_CASE("star-delta intersection transmissibility")
{
  CHECK(star_delta({2, 2}, {2, 2}) == doctest::Approx(2.0));
  CHECK(star_delta({0, 0}, {2, 2}) == 0.0);
  CHECK(star_delta({0, 0}, {0, 0}) == 0.0);
  CHECK(star_delta({1, 3}, {2, 5}) == doctest::Approx(star_delta({2, 5}, {1, 3})));

  // geometric record of a symmetric cross in a unit cell, C = 1: alpha = 1 * 1 / 0.25 = 4
  const auto g = StructuredGrid::uniform({1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  const std::vector<mesh::FractureSurface> fr = {mesh::make_fracture(0, {0.5, 0.5, 0.5}, 1, 1, 0, 90),
                                                 mesh::make_fracture(1, {0.5, 0.5, 0.5}, 1, 1, 90, 90)};
  const auto fm = mesh::embed_all(g, fr);
  REQUIRE(fm.intersections.size() == 1);
  CHECK(ff_intersection_transmissibility(fm.intersections[0], 1.0, 1.0) == doctest::Approx(4.0));
  CHECK(ff_intersection_transmissibility(fm.intersections[0], 0.0, 1.0) == 0.0);
}

TEST_CASE("well terms")
{
  FlowSystem sys;
  sys.props = props_mD(10);
  sys.n_matrix = 2;
  sys.volume = {1.0, 1.0};
  sys.position = {Vec3::Zero(), Vec3::UnitX()};
  Vector p(2);
  p << 10 * MPa, 10 * MPa;

  WellSpec bhp{"i", WellControl::bhp, 10 * MPa, {{0, 1e-12}}};
  CHECK(well_terms(bhp, sys, p)[0].rate == 0.0);

  WellSpec prod{"p", WellControl::bhp, 5 * MPa, {{0, 1e-12}}};
  const auto t = well_terms(prod, sys, p);
  CHECK(t[0].rate < 0.0);
  CHECK(t[0].dq_dp < 0.0);

  const double q = 50.0 / units::day;
  WellSpec rate{"r", WellControl::rate, q, {{1, 1.0}}};
  CHECK(well_terms(rate, sys, p)[0].rate * units::day == doctest::Approx(50.0));
  WellSpec split{"r", WellControl::rate, q, {{0, 1.0}, {1, 3.0}}};
  const auto s = well_terms(split, sys, p);
  CHECK(s[0].rate + s[1].rate == doctest::Approx(q));
  CHECK(s[1].rate == doctest::Approx(0.75 * q));
}

TEST_CASE("peaceman index and well resolution")
{
  const auto g = StructuredGrid::uniform({10, 10, 2}, {20, 20, 10}, {0, 0, 0});
  const Vec3 k = Vec3::Constant(10 * mD);
  const double r_eq = 0.28 * std::sqrt(8.0) / 2.0;  // 0.198 dx for square cells
  CHECK(peaceman_well_index({2, 2, 5}, k, 0.01, 0.0) ==
        doctest::Approx(2 * M_PI * 10 * mD * 5 / std::log(r_eq / 0.01)));
  WellConfig w;
  w.name = "inj";
  w.location = {1.0, 19.0, 0.0};
  const mesh::FractureMesh fm;
  const auto spec = resolve_well(w, g, fm, k);
  CHECK(spec.completions.size() == 2);
  w.location = {100.0, 0.0, 0.0};
  CHECK_THROWS_AS(resolve_well(w, g, fm, k), ConfigError);
  w.location = {1.0, 1.0, 0.0};
  w.fractures = {3};
  CHECK_THROWS_AS(resolve_well(w, g, fm, k), ConfigError);
}

TEST_CASE("uniform pressure without wells is at equilibrium")
{
  const auto g = StructuredGrid::uniform({4, 3, 2}, {4, 3, 2}, {0, 0, 0});
  const std::vector<mesh::FractureSurface> fr = {
      mesh::make_fracture(0, {2.0, 1.5, 1.0}, 3.0, 2.0, 30.0, 90.0, 20.0),
      mesh::make_fracture(1, {2.0, 1.5, 1.0}, 2.0, 2.0, 120.0, 90.0, 20.0)};
  const auto fm = mesh::embed_all(g, fr);
  const auto sys = build_flow_system(g, fm, fr, props_mD(10), {});
  const Vector p = Vector::Constant(sys.size(), 10 * MPa);
  Vector r(sys.size());
  linalg::TripletList jac(sys.size(), sys.size());
  FlowAssemblyInput in;
  in.pressure = &p;
  in.pressure_prev = &p;
  in.dt = 86400.0;
  assemble_flow_residual(sys, in, r, &jac, 0);
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);

  // M-matrix structure with g = 0
  const auto A = linalg::assemble(jac);
  for (int i = 0; i < A.rows(); ++i)
    for (linalg::SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (it.col() == i)
        CHECK(it.value() > 0.0);
      else
        CHECK(it.value() <= 0.0);
    }
  for (const auto& c : sys.connections) CHECK(c.transmissibility >= 0.0);

  in.dt = 0.0;
  CHECK_THROWS_AS(assemble_flow_residual(sys, in, r, nullptr, 0), ScheduleError);
}

TEST_CASE("matrix-fracture exchange is antisymmetric")
{
  const auto g = StructuredGrid::uniform({1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  const std::vector<mesh::FractureSurface> fr = {mesh::make_fracture(0, {0.5, 0.5, 0.5}, 5, 5, 90, 90, 20.0)};
  const auto fm = mesh::embed_all(g, fr);
  const auto sys = build_flow_system(g, fm, fr, props_mD(10), {});
  Vector p(2);
  p << 10 * MPa, 5 * MPa;
  Vector r(2);
  FlowAssemblyInput in;
  in.pressure = &p;
  in.steady = true;
  assemble_flow_residual(sys, in, r, nullptr, 0);
  CHECK(r[0] == -r[1]);
  CHECK(r[0] == doctest::Approx(80 * mD / 1e-3 * 5 * MPa));
}

TEST_CASE("gravity head vanishes at hydrostatic equilibrium")
{
  const auto g = StructuredGrid::uniform({1, 1, 3}, {1, 1, 3}, {0, 0, 0});
  auto props = props_mD(10);
  props.gravity = {0, 0, -9.81};
  const auto sys = build_flow_system(g, mesh::FractureMesh{}, {}, props, {});
  Vector p(3);
  for (int k = 0; k < 3; ++k) p[k] = 10 * MPa - props.density * 9.81 * (k + 0.5);
  Vector r(3);
  FlowAssemblyInput in;
  in.pressure = &p;
  in.steady = true;
  assemble_flow_residual(sys, in, r, nullptr, 0);
  CHECK(r.cwiseAbs().maxCoeff() < 1e-9 * 10 * mD / 1e-3 * MPa);
  p.setConstant(10 * MPa);
  assemble_flow_residual(sys, in, r, nullptr, 0);
  CHECK(r[0] < 0.0);  // without a hydrostatic gradient fluid sinks into the bottom cell
}

TEST_CASE("1D steady flux between fixed end pressures")
{
  // three cells in a row, BHP wells with huge index pin the end cells
  const auto g = StructuredGrid::uniform({3, 1, 1}, {3, 1, 1}, {0, 0, 0});
  const double big = 1e6 * mD;
  std::vector<WellSpec> wells = {{"left", WellControl::bhp, 15 * MPa, {{0, big}}},
                                 {"right", WellControl::bhp, 5 * MPa, {{2, big}}}};
  const auto sys = build_flow_system(g, mesh::FractureMesh{}, {}, props_mD(10), wells);
  const Vector p = solve_steady(sys);
  // series of two TPFA links from cell 0 to cell 2: p1 is the midpoint
  CHECK(p[1] == doctest::Approx(0.5 * (p[0] + p[2])).epsilon(1e-12));
  const double flux = 10 * mD / 1e-3 * (p[0] - p[1]);
  const double inflow = big / 1e-3 * (15 * MPa - p[0]);
  CHECK(flux == doctest::Approx(inflow).epsilon(1e-9));
  CHECK(p.minCoeff() >= 5 * MPa);
  CHECK(p.maxCoeff() <= 15 * MPa);
}

TEST_CASE("closed system conserves mass over a step")
{
  const auto g = StructuredGrid::uniform({5, 5, 1}, {5, 5, 1}, {0, 0, 0});
  const std::vector<mesh::FractureSurface> fr = {mesh::make_fracture(0, {2.5, 2.5, 0.5}, 4.0, 1.0, 35.0, 90.0, 50.0)};
  const auto fm = mesh::embed_all(g, fr);
  const auto sys = build_flow_system(g, fm, fr, props_mD(10), {});
  Vector p0 = Vector::Constant(sys.size(), 10 * MPa);
  for (int i = sys.n_matrix; i < sys.size(); ++i) p0[i] = 20 * MPa;
  const double dt = 3600.0;
  const Vector p1 = step_flow(sys, p0, dt);
  const double s_m = sys.props.inverse_biot_modulus();
  double change = 0.0, scale = 0.0;
  for (int i = 0; i < sys.size(); ++i) {
    const double s = i < sys.n_matrix ? s_m : sys.props.compressibility;
    change += sys.volume[static_cast<std::size_t>(i)] * s * (p1[i] - p0[i]);
    scale += std::abs(sys.volume[static_cast<std::size_t>(i)] * s * (p1[i] - p0[i]));
  }
  CHECK(std::abs(change) <= 1e-9 * scale);
  CHECK(p1.tail(sys.n_fracture).maxCoeff() < 20 * MPa);
}
