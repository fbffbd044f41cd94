#include "edfm/mechanics/equilibrium.hpp"

#include "edfm/errors.hpp"
#include "edfm/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace edfm::mechanics {

namespace {

using Matrix24x3 = Eigen::Matrix<double, 24, 3>;
using Vector24 = Eigen::Matrix<double, 24, 1>;

Matrix6x24 strain_operator(const mesh::ShapeGradients& dN)
{
  Matrix6x24 B;
  for (int a = 0; a < 8; ++a) B.block<6, 3>(0, 3 * a) = sym_dyad(dN.row(a).transpose());
  return B;
}

Vec3 outward_normal(mesh::Side side)
{
  switch (side) {
    case mesh::Side::xmin: return -Vec3::UnitX();
    case mesh::Side::xmax: return Vec3::UnitX();
    case mesh::Side::ymin: return -Vec3::UnitY();
    case mesh::Side::ymax: return Vec3::UnitY();
    case mesh::Side::zmin: return -Vec3::UnitZ();
    case mesh::Side::zmax: return Vec3::UnitZ();
  }
  return Vec3::Zero();
}

std::vector<int> side_nodes(const mesh::StructuredGrid& grid, mesh::Side side)
{
  std::vector<int> nodes;
  for (const auto& f : grid.boundary_faces(side)) nodes.insert(nodes.end(), f.nodes.begin(), f.nodes.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

double dirichlet_scale(const MechModel& model)
{
  return model.props.young * model.grid->min_spacing();
}

}  // namespace

void BoundaryConditionsMech::validate(const mesh::StructuredGrid& grid) const
{
  for (const auto& pin : pins) {
    if (pin.node < 0 || pin.node >= grid.n_nodes())
      throw ConfigError("pinned node " + std::to_string(pin.node) + " outside the grid");
    if (pin.component < 0 || pin.component > 2)
      throw ConfigError("pinned component must be 0, 1 or 2");
  }
}

std::array<int, 24> MechModel::dofs(int cell) const
{
  const auto nodes = grid->cell_nodes(cell);
  std::array<int, 24> d{};
  for (int a = 0; a < 8; ++a)
    for (int c = 0; c < 3; ++c) d[static_cast<std::size_t>(3 * a + c)] = 3 * nodes[static_cast<std::size_t>(a)] + c;
  return d;
}

MechModel build_mech_model(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm, const MechProps& props,
                           const Voigt& prestress)
{
  props.validate();
  MechModel m;
  m.grid = &grid;
  m.fractures = &fm;
  m.props = props;
  m.prestress = prestress;
  const Matrix6 D = props.stiffness();

  // intact elements only differ by their size
  std::map<std::tuple<double, double, double>, int> by_size;
  m.shape_id.resize(static_cast<std::size_t>(grid.n_cells()));
  for (int c = 0; c < grid.n_cells(); ++c) {
    const Vec3 h = grid.cell_size(c);
    const auto key = std::make_tuple(h.x(), h.y(), h.z());
    auto it = by_size.find(key);
    if (it == by_size.end()) {
      const int id = static_cast<int>(m.shapes.size());
      const auto basis = mesh::ElementBasis::compute(grid.cell_node_coords(c));
      Matrix24 K = Matrix24::Zero();
      Matrix6x24 Bbar = Matrix6x24::Zero();
      for (int g = 0; g < mesh::kGaussPerHex; ++g) {
        const auto ug = static_cast<std::size_t>(g);
        const Matrix6x24 B = strain_operator(basis.dN[ug]);
        K += B.transpose() * D * B * basis.jxw[ug];
        Bbar += B * basis.jxw[ug];
      }
      m.shapes.push_back(basis);
      m.stiffness.push_back(K);
      m.strain_avg.push_back(Bbar / basis.volume);
      it = by_size.emplace(key, id).first;
    }
    m.shape_id[static_cast<std::size_t>(c)] = it->second;
  }

  m.fractured_index.assign(static_cast<std::size_t>(grid.n_cells()), -1);
  std::map<int, std::vector<int>> cvs_by_cell;
  for (int cv = 0; cv < fm.n_cvs(); ++cv) cvs_by_cell[fm.cvs[static_cast<std::size_t>(cv)].cell].push_back(cv);
  for (const auto& [cell, cvs] : cvs_by_cell) {
    if (cvs.size() > static_cast<std::size_t>(kMaxFracturesPerElement))
      throw ConfigError("cell " + std::to_string(cell) + " is crossed by " + std::to_string(cvs.size()) +
                        " fractures; at most 2 are supported");
    FracturedElement e;
    e.cell = cell;
    e.n_fractures = static_cast<int>(cvs.size());
    const auto nodes = grid.cell_node_coords(cell);
    const auto& basis = m.shapes[static_cast<std::size_t>(m.shape_id[static_cast<std::size_t>(cell)])];
    for (std::size_t i = 0; i < cvs.size(); ++i) {
      const auto& cut = fm.cuts[static_cast<std::size_t>(cvs[i])];
      e.cv[i] = cvs[i];
      e.normal[i] = cut.normal;
      e.ramp[i] = cut.ramp_gradient;
      const auto grads = mesh::ramp_gradients(basis, mesh::classify_nodes(nodes, cut.normal, cut.plane_point));
      e.coupling[i].setZero();
      for (int g = 0; g < mesh::kGaussPerHex; ++g) {
        const auto ug = static_cast<std::size_t>(g);
        e.coupling[i] += strain_operator(basis.dN[ug]).transpose() * D * sym_dyad(grads[ug]) * basis.jxw[ug];
      }
    }
    m.fractured_index[static_cast<std::size_t>(cell)] = static_cast<int>(m.fractured.size());
    m.fractured.push_back(e);
  }
  return m;
}

ContactState initial_contact_state(const MechModel& model)
{
  ContactState s(model.fractured.size());
  for (auto& e : s)
    for (auto& j : e) j.q = model.props.cohesion;
  return s;
}

Vector dirichlet_values(const MechModel& model, const BoundaryConditionsMech& bc)
{
  Vector v = Vector::Constant(model.n_dofs(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& face : bc.faces)
    for (int c = 0; c < 3; ++c) {
      const auto& d = face.displacement[static_cast<std::size_t>(c)];
      if (!d) continue;
      for (int n : side_nodes(*model.grid, face.side)) v[3 * n + c] = *d;
    }
  for (const auto& pin : bc.pins) v[3 * pin.node + pin.component] = pin.value;
  return v;
}

std::vector<double> volumetric_strain(const MechModel& model, const Vector& u)
{
  const int n = model.grid->n_cells();
  std::vector<double> div(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const auto d = model.dofs(c);
    Vector24 ue;
    for (int k = 0; k < 24; ++k) ue[k] = u[d[static_cast<std::size_t>(k)]];
    const Voigt eps = model.strain_avg[static_cast<std::size_t>(model.shape_id[static_cast<std::size_t>(c)])] * ue;
    div[static_cast<std::size_t>(c)] = eps[0] + eps[1] + eps[2];
  }
  return div;
}

EquilibriumResult assemble_equilibrium(const MechModel& model, const Vector& u, const ContactState& prev,
                                       const PressureView& p, const BoundaryConditionsMech& bc, TripletList* jac,
                                       const BlockLayout& layout, const LocalOptions& local)
{
  const auto& grid = *model.grid;
  const auto& props = model.props;
  const int ndof = model.n_dofs();
  if (u.size() != ndof) throw ConfigError("displacement vector has the wrong size");
  if (prev.size() != model.fractured.size()) throw ConfigError("contact state has the wrong size");
  if (static_cast<int>(p.matrix.size()) != grid.n_cells()) throw ConfigError("matrix pressure has the wrong size");
  if (static_cast<int>(p.fracture.size()) != model.fractures->n_cvs())
    throw ConfigError("fracture pressure has the wrong size");

  EquilibriumResult out;
  out.residual = Vector::Zero(ndof);
  out.state = prev;
  out.sigma_bar.assign(model.fractured.size(), Voigt::Zero());
  out.dirichlet_scale = dirichlet_scale(model);
  const Voigt m = voigt_identity();
  const double b = props.biot;

  // element contact problems
  std::vector<LocalSolution> sols(model.fractured.size());
  parallel_for(static_cast<int>(model.fractured.size()), [&](int k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& e = model.fractured[uk];
    const auto d = model.dofs(e.cell);
    Vector24 ue;
    for (int j = 0; j < 24; ++j) ue[j] = u[d[static_cast<std::size_t>(j)]];
    LocalProblem pb;
    pb.n_fractures = e.n_fractures;
    pb.cell = e.cell;
    pb.strain = model.strain_avg[static_cast<std::size_t>(model.shape_id[static_cast<std::size_t>(e.cell)])] * ue;
    pb.prestress = model.prestress;
    pb.p_matrix = p.matrix[static_cast<std::size_t>(e.cell)];
    for (int i = 0; i < e.n_fractures; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      pb.normal[ui] = e.normal[ui];
      pb.ramp[ui] = e.ramp[ui];
      pb.prev[ui] = prev[uk][ui];
      pb.p_fracture[ui] = p.fracture[static_cast<std::size_t>(e.cv[ui])];
    }
    sols[uk] = local_return_mapping(props, pb, local);
  });
  for (std::size_t k = 0; k < sols.size(); ++k) {
    out.state[k] = sols[k].state;
    out.sigma_bar[k] = sols[k].sigma_bar;
    if (sols[k].relaxed) ++out.relaxed;
  }

  const Vector dir = dirichlet_values(model, bc);
  std::vector<char> fixed(static_cast<std::size_t>(ndof), 0);
  for (int i = 0; i < ndof; ++i) fixed[static_cast<std::size_t>(i)] = std::isnan(dir[i]) ? 0 : 1;
  auto add = [&](int row, int col, double v) {
    if (!fixed[static_cast<std::size_t>(row)] && v != 0.0) jac->add(layout.u_offset + row, col, v);
  };

  for (int c = 0; c < grid.n_cells(); ++c) {
    const auto uc = static_cast<std::size_t>(c);
    const int sid = model.shape_id[uc];
    const Matrix24& K = model.stiffness[static_cast<std::size_t>(sid)];
    const Matrix6x24& Bbar = model.strain_avg[static_cast<std::size_t>(sid)];
    const double V = model.shapes[static_cast<std::size_t>(sid)].volume;
    const auto d = model.dofs(c);
    Vector24 ue;
    for (int j = 0; j < 24; ++j) ue[j] = u[d[static_cast<std::size_t>(j)]];

    const Vector24 pre = V * Bbar.transpose() * (model.prestress - b * p.matrix[uc] * m);
    Vector24 fe = K * ue + pre;
    Matrix24 Ke = K;
    Vector24 dfe_dpm = -b * V * Bbar.transpose() * m;
    std::array<Vector24, kMaxFracturesPerElement> dfe_dpf;
    for (auto& v : dfe_dpf) v.setZero();

    const int fk = model.fractured_index[uc];
    if (fk >= 0) {
      const auto& e = model.fractured[static_cast<std::size_t>(fk)];
      const auto& sol = sols[static_cast<std::size_t>(fk)];
      for (int i = 0; i < e.n_fractures; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const Matrix24x3& C = e.coupling[ui];
        const auto S = sol.sensitivity.middleRows(3 * i, 3);
        fe -= C * sol.state[ui].jump;
        Ke -= C * S.leftCols(6) * Bbar;
        dfe_dpm -= C * S.col(6);
        for (int j = 0; j < e.n_fractures; ++j) dfe_dpf[static_cast<std::size_t>(j)] -= C * S.col(7 + j);
      }
      if (jac && layout.pf_offset >= 0)
        for (int j = 0; j < e.n_fractures; ++j)
          for (int r = 0; r < 24; ++r)
            add(d[static_cast<std::size_t>(r)], layout.pf_offset + e.cv[static_cast<std::size_t>(j)],
                dfe_dpf[static_cast<std::size_t>(j)][r]);
    }

    if (props.density != 0.0 && props.gravity.squaredNorm() > 0.0) {
      const auto& basis = model.shapes[static_cast<std::size_t>(sid)];
      for (int g = 0; g < mesh::kGaussPerHex; ++g)
        for (int a = 0; a < 8; ++a)
          fe.segment<3>(3 * a) -= basis.N[static_cast<std::size_t>(g)][a] * props.density * props.gravity *
                                  basis.jxw[static_cast<std::size_t>(g)];
    }

    for (int r = 0; r < 24; ++r) out.residual[d[static_cast<std::size_t>(r)]] += fe[r];
    if (jac) {
      for (int r = 0; r < 24; ++r)
        for (int s = 0; s < 24; ++s)
          add(d[static_cast<std::size_t>(r)], layout.u_offset + d[static_cast<std::size_t>(s)], Ke(r, s));
      if (layout.pm_offset >= 0)
        for (int r = 0; r < 24; ++r) add(d[static_cast<std::size_t>(r)], layout.pm_offset + c, dfe_dpm[r]);
    }
  }

  // surface loads on the free components
  for (const auto& face : bc.faces) {
    const Vec3 nu = outward_normal(face.side);
    const Vec3 t = face.far_field ? Vec3(to_tensor(bc.far_field) * nu) : face.traction;
    for (const auto& f : grid.boundary_faces(face.side))
      for (int node : f.nodes)
        for (int c = 0; c < 3; ++c)
          if (!face.displacement[static_cast<std::size_t>(c)]) out.residual[3 * node + c] -= 0.25 * f.area * t[c];
  }

  const double scale = out.dirichlet_scale;
  for (int i = 0; i < ndof; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) continue;
    out.residual[i] = scale * (u[i] - dir[i]);
    if (jac) jac->add(layout.u_offset + i, layout.u_offset + i, scale);
  }
  return out;
}

MechSolveResult solve_mechanics(const MechModel& model, const BoundaryConditionsMech& bc, const PressureView& p,
                                const ContactState& prev, const MechSolveOptions& options, const Vector* u0)
{
  bc.validate(*model.grid);
  const int ndof = model.n_dofs();
  MechSolveResult res;
  res.u = u0 ? *u0 : Vector::Zero(ndof);
  const Vector dir = dirichlet_values(model, bc);
  for (int i = 0; i < ndof; ++i)
    if (!std::isnan(dir[i])) res.u[i] = dir[i];

  const double h = model.grid->min_spacing();
  const double target = options.tolerance * model.props.young * h * h;
  for (int it = 0; it <= options.max_iterations; ++it) {
    TripletList jac(ndof, ndof);
    auto eq = assemble_equilibrium(model, res.u, prev, p, bc, &jac, {}, options.local);
    const double r = eq.residual.lpNorm<Eigen::Infinity>();
    res.residual_history.push_back(r);
    res.state = std::move(eq.state);
    res.relaxed = eq.relaxed;
    res.iterations = it;
    spdlog::debug("mechanics newton {}: |R| = {:.3e} N (target {:.3e}), relaxed {}", it, r, target, eq.relaxed);
    if (r <= target) return res;
    if (it == options.max_iterations) break;
    const Vector du = linalg::solve(linalg::assemble(std::move(jac)), eq.residual, options.linear);
    res.u -= du;
  }
  throw ConvergenceError("mechanics Newton did not converge in " + std::to_string(options.max_iterations) +
                             " iterations",
                         res.residual_history.back());
}

std::vector<ProfilePoint> fracture_profile(const MechModel& model, const ContactState& state, int fracture)
{
  const auto& fm = *model.fractures;
  if (fracture < 0 || fracture >= static_cast<int>(fm.by_fracture.size()))
    throw ConfigError("unknown fracture index " + std::to_string(fracture));
  const auto& ids = fm.by_fracture[static_cast<std::size_t>(fracture)];
  std::vector<ProfilePoint> out;
  if (ids.empty()) return out;

  // keep the layer of cells containing the mean CV height
  double zmean = 0.0;
  for (int cv : ids) zmean += fm.cvs[static_cast<std::size_t>(cv)].centroid.z();
  zmean /= static_cast<double>(ids.size());
  const auto zr = model.grid->cell_range(2, zmean, zmean);
  const int layer = zr[0];

  for (int cv : ids) {
    const auto& rec = fm.cvs[static_cast<std::size_t>(cv)];
    if (model.grid->cell_ijk(rec.cell)[2] != layer) continue;
    const int k = model.fractured_index[static_cast<std::size_t>(rec.cell)];
    const auto& e = model.fractured[static_cast<std::size_t>(k)];
    const int slot = e.cv[0] == cv ? 0 : 1;
    const JumpState& js = state[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)];
    const Vec3& n = e.normal[static_cast<std::size_t>(slot)];
    ProfilePoint pt;
    pt.cv = cv;
    pt.arc = rec.arc;
    pt.opening = js.jump.dot(n);
    pt.slip = (js.jump - pt.opening * n).norm();
    pt.status = js.status;
    out.push_back(pt);
  }
  std::sort(out.begin(), out.end(), [](const ProfilePoint& a, const ProfilePoint& b) { return a.arc < b.arc; });
  return out;
}

}  // namespace edfm::mechanics
