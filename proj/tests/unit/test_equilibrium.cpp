#include "edfm/errors.hpp"
#include "edfm/mechanics/equilibrium.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>

using namespace edfm;
using namespace edfm::mechanics;

namespace {

constexpr double MPa = 1e6;

MechProps props()
{
  MechProps p;
  p.young = 1000.0 * MPa;
  p.poisson = 0.25;
  p.friction = 0.6;
  return p;
}

BoundaryConditionsMech traction_box(const mesh::StructuredGrid& g, const Voigt& far)
{
  BoundaryConditionsMech bc;
  bc.far_field = far;
  for (auto s : {mesh::Side::xmin, mesh::Side::xmax, mesh::Side::ymin, mesh::Side::ymax, mesh::Side::zmin,
                 mesh::Side::zmax}) {
    FaceBC f;
    f.side = s;
    f.far_field = true;
    bc.faces.push_back(f);
  }
  // fix translation and rotation with six node constraints
  const int n0 = g.node_index(0, 0, 0);
  const int nx = g.node_index(g.nx(), 0, 0);
  const int ny = g.node_index(0, g.ny(), 0);
  bc.pins = {{n0, 0, 0.0}, {n0, 1, 0.0}, {n0, 2, 0.0}, {nx, 1, 0.0}, {nx, 2, 0.0}, {ny, 2, 0.0}};
  return bc;
}

/// Small-strain displacement u = eps . x (engineering shear halved), origin fixed.
Vec3 linear_field(const Voigt& eps, const Vec3& x)
{
  Eigen::Matrix3d e;
  e << eps[0], 0.5 * eps[3], 0.5 * eps[5], 0.5 * eps[3], eps[1], 0.5 * eps[4], 0.5 * eps[5], 0.5 * eps[4], eps[2];
  return e * x;
}

}  // namespace

TEST_CASE("patch test: far-field traction gives a uniform stress state")
{
  const auto g = mesh::StructuredGrid({0.0, 0.7, 2.0, 3.0}, {0.0, 1.5, 2.0}, {0.0, 0.4, 1.0});
  const mesh::FractureMesh fm;
  const auto p = props();
  const auto model = build_mech_model(g, fm, p);
  // pure normal stresses: the pin set above removes rotation without reaction
  const Voigt S = (Voigt() << -10, 4, -3, 0, 0, 0).finished() * MPa;
  const auto bc = traction_box(g, S);
  const std::vector<double> pm(static_cast<std::size_t>(g.n_cells()), 0.0);
  const auto sol = solve_mechanics(model, bc, {pm, {}}, initial_contact_state(model));
  const Voigt eps = p.stiffness().lu().solve(S);
  double err = 0.0;
  for (int n = 0; n < g.n_nodes(); ++n)
    err = std::max(err, (sol.u.segment<3>(3 * n) - linear_field(eps, g.node(n))).norm());
  CHECK(err < 1e-12);
  CHECK(sol.iterations <= 1);
}

TEST_CASE("uniform pore pressure with b = 1 expands a free box isotropically")
{
  const auto g = mesh::StructuredGrid::uniform({2, 2, 2}, {2.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
  const mesh::FractureMesh fm;
  auto p = props();
  p.biot = 1.0;
  const auto model = build_mech_model(g, fm, p);
  const auto bc = traction_box(g, Voigt::Zero());
  const std::vector<double> pm(static_cast<std::size_t>(g.n_cells()), 2.0 * MPa);
  const auto sol = solve_mechanics(model, bc, {pm, {}}, initial_contact_state(model));
  // total stress stays zero, so the effective stress equals b p I
  const Voigt eps = p.stiffness().lu().solve(Voigt(2.0 * MPa * voigt_identity()));
  for (int n = 0; n < g.n_nodes(); ++n) CHECK((sol.u.segment<3>(3 * n) - linear_field(eps, g.node(n))).norm() < 1e-12);
  const auto div = volumetric_strain(model, sol.u);
  CHECK(div[0] == doctest::Approx(3.0 * 2.0 * MPa / (3.0 * p.bulk_modulus())).epsilon(1e-10));
}

TEST_CASE("prestress with matching far-field traction is in equilibrium at u = 0")
{
  const auto g = mesh::StructuredGrid::uniform({3, 3, 1}, {3.0, 3.0, 1.0}, {0.0, 0.0, 0.0});
  const std::vector<mesh::FractureSurface> fr{mesh::make_fracture(0, {1.6, 1.4, 0.5}, 2.0, 2.0, 25.0, 90.0)};
  const auto fm = mesh::embed_all(g, fr);
  const Voigt S = (Voigt() << -20, -15, -30, 1, 0, 0).finished() * MPa;
  const auto model = build_mech_model(g, fm, props(), S);
  const auto bc = traction_box(g, S);
  const std::vector<double> pm(static_cast<std::size_t>(g.n_cells()), 0.0);
  const std::vector<double> pf(static_cast<std::size_t>(fm.n_cvs()), 0.0);
  const Vector u = Vector::Zero(model.n_dofs());
  const auto eq = assemble_equilibrium(model, u, initial_contact_state(model), {pm, pf}, bc);
  CHECK(eq.residual.lpNorm<Eigen::Infinity>() < 1e-6);
  for (const auto& e : eq.state) CHECK(e[0].status == FractureStatus::stick);
}

TEST_CASE("global tangent matches central differences on a sliding fracture")
{
  const auto g = mesh::StructuredGrid::uniform({2, 2, 1}, {2.0, 2.0, 1.0}, {0.0, 0.0, 0.0});
  const std::vector<mesh::FractureSurface> fr{mesh::make_fracture(0, {1.1, 0.95, 0.5}, 3.0, 2.0, 30.0, 90.0)};
  const auto fm = mesh::embed_all(g, fr);
  REQUIRE(fm.n_cvs() >= 3);
  auto p = props();
  p.dilation = 0.1;
  p.hardening = 50.0 * MPa;
  const Voigt S0 = (Voigt() << -10, -2, -5, 0, 0, 0).finished() * MPa;
  const auto model = build_mech_model(g, fm, p, S0);
  BoundaryConditionsMech bc = traction_box(g, S0);
  bc.faces[0].displacement = {0.0, 0.0, 0.0};

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vector u(model.n_dofs());
  for (int i = 0; i < u.size(); ++i) u[i] = 1e-4 * U(rng);
  std::vector<double> pm(static_cast<std::size_t>(g.n_cells()));
  std::vector<double> pf(static_cast<std::size_t>(fm.n_cvs()));
  for (auto& v : pm) v = (1.0 + 0.2 * U(rng)) * MPa;
  for (auto& v : pf) v = (1.5 + 0.2 * U(rng)) * MPa;

  const int nu = model.n_dofs();
  const int nm = g.n_cells();
  const int n = nu + nm + fm.n_cvs();
  LocalOptions lo;
  lo.tolerance = 1e-9;
  const auto prev = initial_contact_state(model);
  TripletList trip(nu, n);
  BlockLayout layout{0, nu, nu + nm};
  const auto base = assemble_equilibrium(model, u, prev, {pm, pf}, bc, &trip, layout, lo);
  int slipping = 0;
  for (const auto& e : base.state) slipping += e[0].status == FractureStatus::slip ? 1 : 0;
  REQUIRE(slipping >= 2);
  const Eigen::MatrixXd J = Eigen::MatrixXd(linalg::assemble(trip));

  auto residual = [&](const Vector& uu, const std::vector<double>& a, const std::vector<double>& b) {
    return assemble_equilibrium(model, uu, prev, {a, b}, bc, nullptr, layout, lo).residual;
  };
  Eigen::MatrixXd Jfd(nu, n);
  for (int j = 0; j < n; ++j) {
    Vector up = u, um = u;
    auto pmp = pm, pmm = pm;
    auto pfp = pf, pfm = pf;
    double h;
    if (j < nu) {
      h = 1e-9;
      up[j] += h;
      um[j] -= h;
    } else if (j < nu + nm) {
      h = 10.0;
      pmp[static_cast<std::size_t>(j - nu)] += h;
      pmm[static_cast<std::size_t>(j - nu)] -= h;
    } else {
      h = 10.0;
      pfp[static_cast<std::size_t>(j - nu - nm)] += h;
      pfm[static_cast<std::size_t>(j - nu - nm)] -= h;
    }
    Jfd.col(j) = (residual(up, pmp, pfp) - residual(um, pmm, pfm)) / (2.0 * h);
  }
  const double uu = (J.leftCols(nu) - Jfd.leftCols(nu)).cwiseAbs().maxCoeff() / J.leftCols(nu).cwiseAbs().maxCoeff();
  const double up = (J.rightCols(n - nu) - Jfd.rightCols(n - nu)).cwiseAbs().maxCoeff() /
                    J.rightCols(n - nu).cwiseAbs().maxCoeff();
  CHECK(uu < 1e-5);
  CHECK(up < 1e-5);
}

TEST_CASE("more than two fractures in one element is rejected")
{
  const auto g = mesh::StructuredGrid::uniform({1, 1, 1}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  const std::vector<mesh::FractureSurface> fr{mesh::make_fracture(0, {0.5, 0.5, 0.5}, 2.0, 2.0, 10.0, 90.0),
                                              mesh::make_fracture(1, {0.5, 0.5, 0.5}, 2.0, 2.0, 70.0, 90.0),
                                              mesh::make_fracture(2, {0.5, 0.5, 0.5}, 2.0, 2.0, 130.0, 90.0)};
  const auto fm = mesh::embed_all(g, fr);
  CHECK_THROWS_AS(build_mech_model(g, fm, props()), ConfigError);
}

TEST_CASE("fracture profile is ordered along strike")
{
  const auto g = mesh::StructuredGrid::uniform({8, 3, 1}, {8.0, 3.0, 1.0}, {0.0, 0.0, 0.0});
  const std::vector<mesh::FractureSurface> fr{mesh::make_fracture(0, {4.0, 1.5, 0.5}, 6.0, 2.0, 0.0, 90.0)};
  const auto fm = mesh::embed_all(g, fr);
  const auto model = build_mech_model(g, fm, props());
  auto state = initial_contact_state(model);
  for (std::size_t k = 0; k < state.size(); ++k) state[k][0].jump = Vec3(0.1 * static_cast<double>(k), 0.02, 0.0);
  const auto prof = fracture_profile(model, state, 0);
  REQUIRE(prof.size() == 6);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].arc > prof[i - 1].arc);
  for (const auto& pt : prof) CHECK(std::abs(pt.opening) == doctest::Approx(0.02));
  CHECK_THROWS_AS(fracture_profile(model, state, 3), ConfigError);
}
