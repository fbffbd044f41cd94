#include "edfm/io/vtk.hpp"

#include "edfm/errors.hpp"
#include "edfm/io/format.hpp"

#include <fstream>

namespace edfm::io {

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

struct CVSlot
{
  int element = -1;  // index into MechModel::fractured
  int slot = 0;
};

std::vector<CVSlot> cv_slots(const coupling::CoupledModel& model)
{
  std::vector<CVSlot> out(static_cast<std::size_t>(model.fm->n_cvs()));
  for (std::size_t k = 0; k < model.mech.fractured.size(); ++k) {
    const auto& e = model.mech.fractured[k];
    for (int i = 0; i < e.n_fractures; ++i)
      out[static_cast<std::size_t>(e.cv[static_cast<std::size_t>(i)])] = {static_cast<int>(k), i};
  }
  return out;
}

struct CVResult
{
  int status = 0;
  double slip = 0.0;
  double opening = 0.0;
  double tn = 0.0;
  double tt = 0.0;
};

CVResult cv_result(const coupling::CoupledModel& model, const coupling::CoupledState& s, const CVSlot& at)
{
  CVResult r;
  if (at.element < 0) return r;
  const auto& e = model.mech.fractured[static_cast<std::size_t>(at.element)];
  const auto& js = s.contact[static_cast<std::size_t>(at.element)][static_cast<std::size_t>(at.slot)];
  const mesh::Vec3& n = e.normal[static_cast<std::size_t>(at.slot)];
  r.status = static_cast<int>(js.status);
  r.opening = js.jump.dot(n);
  r.slip = (js.jump - r.opening * n).norm();
  r.tn = js.traction.dot(n);
  r.tt = (js.traction - r.tn * n).norm();
  return r;
}

}  // namespace

void write_grid_vtk(const mesh::StructuredGrid& grid, const linalg::Vector& u, std::span<const double> p_matrix,
                    std::span<const double> div_u, const std::filesystem::path& path)
{
  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\nfracture-mechanics grid\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << grid.n_nodes() << " double\n";
  for (int n = 0; n < grid.n_nodes(); ++n) {
    const auto x = grid.node(n);
    out << fmt_real(x.x()) << ' ' << fmt_real(x.y()) << ' ' << fmt_real(x.z()) << '\n';
  }
  out << "CELLS " << grid.n_cells() << ' ' << 9 * grid.n_cells() << '\n';
  for (int c = 0; c < grid.n_cells(); ++c) {
    out << 8;
    for (int n : grid.cell_nodes(c)) out << ' ' << n;
    out << '\n';
  }
  out << "CELL_TYPES " << grid.n_cells() << '\n';
  for (int c = 0; c < grid.n_cells(); ++c) out << "12\n";

  const auto nc = static_cast<std::size_t>(grid.n_cells());
  if (!p_matrix.empty() || !div_u.empty()) out << "CELL_DATA " << grid.n_cells() << '\n';
  auto scalar = [&](const char* name, std::span<const double> v) {
    if (v.empty()) return;
    if (v.size() != nc) throw ConfigError(std::string("vtk: field ") + name + " has the wrong length");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << fmt_real(x) << '\n';
  };
  scalar("p_matrix", p_matrix);
  scalar("div_u", div_u);
  if (u.size() > 0) {
    if (u.size() != 3 * grid.n_nodes()) throw ConfigError("vtk: displacement has the wrong length");
    out << "POINT_DATA " << grid.n_nodes() << "\nVECTORS displacement double\n";
    for (int n = 0; n < grid.n_nodes(); ++n)
      out << fmt_real(u[3 * n]) << ' ' << fmt_real(u[3 * n + 1]) << ' ' << fmt_real(u[3 * n + 2]) << '\n';
  }
}

void write_fracture_vtk(const coupling::CoupledModel& model, const coupling::CoupledState& state, int fracture,
                        const std::filesystem::path& path)
{
  if (fracture < 0 || fracture >= static_cast<int>(model.fm->by_fracture.size()))
    throw ConfigError("vtk: no fracture with index " + std::to_string(fracture));
  const auto& ids = model.fm->by_fracture[static_cast<std::size_t>(fracture)];
  const auto slots = cv_slots(model);
  std::size_t n_points = 0;
  for (int id : ids) n_points += model.fm->cuts[static_cast<std::size_t>(id)].polygon.size();

  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\nfracture " << fracture + 1 << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << n_points << " double\n";
  for (int id : ids)
    for (const auto& x : model.fm->cuts[static_cast<std::size_t>(id)].polygon)
      out << fmt_real(x.x()) << ' ' << fmt_real(x.y()) << ' ' << fmt_real(x.z()) << '\n';
  out << "POLYGONS " << ids.size() << ' ' << ids.size() + n_points << '\n';
  std::size_t next = 0;
  for (int id : ids) {
    const auto m = model.fm->cuts[static_cast<std::size_t>(id)].polygon.size();
    out << m;
    for (std::size_t j = 0; j < m; ++j) out << ' ' << next++;
    out << '\n';
  }
  out << "CELL_DATA " << ids.size() << '\n';
  std::vector<CVResult> res;
  for (int id : ids) res.push_back(cv_result(model, state, slots[static_cast<std::size_t>(id)]));
  out << "SCALARS p_fracture double 1\nLOOKUP_TABLE default\n";
  for (int id : ids) out << fmt_real(state.p[model.flow.n_matrix + id]) << '\n';
  out << "SCALARS status int 1\nLOOKUP_TABLE default\n";
  for (const auto& r : res) out << r.status << '\n';
  out << "SCALARS jump_tangential double 1\nLOOKUP_TABLE default\n";
  for (const auto& r : res) out << fmt_real(r.slip) << '\n';
  out << "SCALARS jump_normal double 1\nLOOKUP_TABLE default\n";
  for (const auto& r : res) out << fmt_real(r.opening) << '\n';
}

void write_fracture_csv(const coupling::CoupledModel& model, const coupling::CoupledState& state,
                        const std::filesystem::path& path)
{
  const auto slots = cv_slots(model);
  auto out = open_output(path);
  out << "fracture,cv,arc_m,status,slip_m,opening_m,t_n_mpa,t_tau_mpa,p_fracture_mpa\n";
  for (std::size_t f = 0; f < model.fm->by_fracture.size(); ++f)
    for (int id : model.fm->by_fracture[f]) {
      const auto r = cv_result(model, state, slots[static_cast<std::size_t>(id)]);
      out << f + 1 << ',' << id << ',' << fmt_real(model.fm->cvs[static_cast<std::size_t>(id)].arc) << ',' << r.status
          << ',' << fmt_real(r.slip) << ',' << fmt_real(r.opening) << ',' << fmt_real(r.tn / 1e6) << ','
          << fmt_real(r.tt / 1e6) << ',' << fmt_real(state.p[model.flow.n_matrix + id] / 1e6) << '\n';
    }
}

void write_snapshot(const coupling::CoupledModel& model, const coupling::CoupledState& state,
                    const std::filesystem::path& dir, const std::string& tag, bool vtk, bool csv)
{
  if (vtk) {
    write_grid_vtk(*model.grid, state.u, std::span<const double>(state.p.data(), model.flow.n_matrix), state.div_u,
                   dir / (tag + "_grid.vtk"));
    for (std::size_t f = 0; f < model.fm->by_fracture.size(); ++f)
      write_fracture_vtk(model, state, static_cast<int>(f), dir / (tag + "_fracture" + std::to_string(f + 1) + ".vtk"));
  }
  if (csv) write_fracture_csv(model, state, dir / (tag + "_fractures.csv"));
}

}  // namespace edfm::io
