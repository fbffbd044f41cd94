#include "edfm/flow/flow.hpp"

#include "edfm/errors.hpp"
#include "edfm/units.hpp"

#include <cmath>
#include <numbers>

namespace edfm::flow {

double FlowProps::inverse_biot_modulus() const
{
  return porosity * compressibility + (1.0 - biot) * (biot - porosity) / bulk_modulus;
}

void FlowProps::validate() const
{
  if (!(permeability.minCoeff() > 0.0)) throw ConfigError("permeability must be positive");
  if (!(porosity > 0.0 && porosity < 1.0)) throw ConfigError("porosity must lie in (0, 1)");
  if (!(compressibility >= 0.0)) throw ConfigError("fluid compressibility must be non-negative");
  if (!(viscosity > 0.0)) throw ConfigError("viscosity must be positive");
  if (!(bulk_modulus > 0.0)) throw ConfigError("bulk modulus must be positive");
  if (!(biot >= porosity && biot <= 1.0)) throw ConfigError("Biot coefficient must lie in [porosity, 1]");
}

std::vector<Connection> mm_transmissibility(const mesh::StructuredGrid& grid, const Vec3& permeability)
{
  std::vector<Connection> out;
  out.reserve(grid.interior_faces().size());
  for (const auto& f : grid.interior_faces()) {
    const double h_lo = 0.5 * grid.cell_size(f.cell_lo)[f.axis];
    const double h_hi = 0.5 * grid.cell_size(f.cell_hi)[f.axis];
    const double k = permeability[f.axis];
    const double t_lo = f.area * k / h_lo;
    const double t_hi = f.area * k / h_hi;
    const double t = t_lo + t_hi > 0.0 ? t_lo * t_hi / (t_lo + t_hi) : 0.0;
    out.push_back({ConnectionType::matrix_matrix, f.cell_lo, f.cell_hi, t});
  }
  return out;
}

double mf_transmissibility(const mesh::FractureCut& cut, const Vec3& permeability)
{
  if (!(cut.dbar > 0.0)) throw GeometryError("matrix-fracture transmissibility with zero dbar");
  const Vec3& n = cut.normal;
  const double knn = n.cwiseProduct(n).dot(permeability);
  return 2.0 * cut.area * knn / cut.dbar;
}

double ff_adjacent_transmissibility(const mesh::FractureCV& a, const mesh::FractureCV& b,
                                    const mesh::CVAdjacency& edge, const Vec3& normal, double conductivity_a,
                                    double conductivity_b)
{
  Vec3 nu = edge.edge_direction.cross(normal).normalized();
  if (nu.dot(b.centroid - a.centroid) < 0.0) nu = -nu;
  auto half = [&](const Vec3& c, double cond) {
    const Vec3 d = edge.edge_midpoint - c;
    return edge.edge_length * cond * std::abs(d.dot(nu)) / d.squaredNorm();
  };
  const double ta = half(a.centroid, conductivity_a);
  const double tb = half(b.centroid, conductivity_b);
  if (ta + tb <= 0.0) return 0.0;
  return ta * tb / (ta + tb);
}

double star_delta(const std::array<double, 2>& alpha1, const std::array<double, 2>& alpha2)
{
  const double sum = alpha1[0] + alpha1[1] + alpha2[0] + alpha2[1];
  if (sum <= 0.0) return 0.0;
  return (alpha1[0] + alpha1[1]) * (alpha2[0] + alpha2[1]) / sum;
}

double ff_intersection_transmissibility(const mesh::IntersectionRecord& rec, double conductivity1,
                                        double conductivity2)
{
  auto alpha = [&](const mesh::SubSegment& s, double cond) {
    if (s.area <= 0.0 || s.distance <= 0.0) return 0.0;
    return cond * rec.length / s.distance;
  };
  return star_delta({alpha(rec.parts1[0], conductivity1), alpha(rec.parts1[1], conductivity1)},
                    {alpha(rec.parts2[0], conductivity2), alpha(rec.parts2[1], conductivity2)});
}

double peaceman_well_index(const Vec3& cell_size, const Vec3& permeability, double radius, double skin)
{
  const double kx = permeability.x();
  const double ky = permeability.y();
  const double dx = cell_size.x();
  const double dy = cell_size.y();
  const double r_eq = 0.28 * std::sqrt(std::sqrt(ky / kx) * dx * dx + std::sqrt(kx / ky) * dy * dy) /
                      (std::pow(ky / kx, 0.25) + std::pow(kx / ky, 0.25));
  const double denom = std::log(r_eq / radius) + skin;
  if (!(denom > 0.0)) throw ConfigError("well radius exceeds the Peaceman equivalent radius");
  return 2.0 * std::numbers::pi * std::sqrt(kx * ky) * cell_size.z() / denom;
}

namespace {

bool overlaps_z(const mesh::StructuredGrid& grid, int cell, const WellConfig& w)
{
  return grid.cell_lo(cell).z() < w.z_top && grid.cell_hi(cell).z() > w.z_bottom;
}

bool contains_xy(const mesh::StructuredGrid& grid, int cell, const Vec3& p, double tol)
{
  const Vec3 lo = grid.cell_lo(cell);
  const Vec3 hi = grid.cell_hi(cell);
  return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol && p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
}

}  // namespace

WellSpec resolve_well(const WellConfig& config, const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                      const Vec3& permeability)
{
  WellSpec spec;
  spec.name = config.name;
  spec.control = config.control;
  spec.value = config.value;
  const double tol = 1e-9 * grid.min_spacing();
  if (config.fractures.empty()) {
    for (int k = 0; k < grid.nz(); ++k) {
      const double zc = 0.5 * (grid.coords(2)[static_cast<std::size_t>(k)] + grid.coords(2)[static_cast<std::size_t>(k) + 1]);
      const auto cell = grid.locate({config.location.x(), config.location.y(), zc});
      if (!cell || !overlaps_z(grid, *cell, config)) continue;
      spec.completions.push_back(
          {*cell, peaceman_well_index(grid.cell_size(*cell), permeability, config.radius, config.skin)});
    }
  } else {
    const double wi = kFractureWellIndexMdM * units::millidarcy;
    for (int f : config.fractures) {
      if (f < 0 || f >= static_cast<int>(fm.by_fracture.size()))
        throw ConfigError("well '" + config.name + "' references unknown fracture index " + std::to_string(f));
      for (int id : fm.by_fracture[static_cast<std::size_t>(f)]) {
        const int cell = fm.cvs[static_cast<std::size_t>(id)].cell;
        if (contains_xy(grid, cell, config.location, tol) && overlaps_z(grid, cell, config))
          spec.completions.push_back({grid.n_cells() + id, wi});
      }
    }
  }
  if (spec.completions.empty())
    throw ConfigError("well '" + config.name + "' has no completion inside the model");
  return spec;
}

ConnectionList build_connections(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                                 const std::vector<mesh::FractureSurface>& fractures, const FlowProps& props)
{
  ConnectionList list = mm_transmissibility(grid, props.permeability);
  const int nm = grid.n_cells();
  for (int i = 0; i < fm.n_cvs(); ++i) {
    const auto& cut = fm.cuts[static_cast<std::size_t>(i)];
    list.push_back({ConnectionType::matrix_fracture, cut.cell, nm + i, mf_transmissibility(cut, props.permeability)});
  }
  auto cond = [&](int cv) {
    return fractures[static_cast<std::size_t>(fm.cvs[static_cast<std::size_t>(cv)].fracture)].conductivity *
           units::millidarcy;
  };
  for (const auto& adj : fm.adjacency) {
    const auto& a = fm.cvs[static_cast<std::size_t>(adj.cv_a)];
    const auto& b = fm.cvs[static_cast<std::size_t>(adj.cv_b)];
    const Vec3& n = fm.cuts[static_cast<std::size_t>(adj.cv_a)].normal;
    list.push_back({ConnectionType::fracture_adjacent, nm + adj.cv_a, nm + adj.cv_b,
                    ff_adjacent_transmissibility(a, b, adj, n, cond(adj.cv_a), cond(adj.cv_b))});
  }
  for (const auto& rec : fm.intersections)
    list.push_back({ConnectionType::fracture_intersection, nm + rec.cv1, nm + rec.cv2,
                    ff_intersection_transmissibility(rec, cond(rec.cv1), cond(rec.cv2))});
  return list;
}

FlowSystem build_flow_system(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                             const std::vector<mesh::FractureSurface>& fractures, const FlowProps& props,
                             std::vector<WellSpec> wells)
{
  props.validate();
  FlowSystem sys;
  sys.props = props;
  sys.n_matrix = grid.n_cells();
  sys.n_fracture = fm.n_cvs();
  sys.volume.reserve(static_cast<std::size_t>(sys.size()));
  sys.position.reserve(static_cast<std::size_t>(sys.size()));
  for (int c = 0; c < grid.n_cells(); ++c) {
    sys.volume.push_back(grid.cell_volume(c));
    sys.position.push_back(grid.cell_center(c));
  }
  for (const auto& cv : fm.cvs) {
    sys.volume.push_back(cv.area * fractures[static_cast<std::size_t>(cv.fracture)].aperture);
    sys.position.push_back(cv.centroid);
  }
  sys.connections = build_connections(grid, fm, fractures, props);
  for (std::size_t w = 0; w < wells.size(); ++w)
    for (const auto& c : wells[w].completions)
      sys.connections.push_back({c.cv < sys.n_matrix ? ConnectionType::well_matrix : ConnectionType::well_fracture,
                                 c.cv, static_cast<int>(w), c.wi});
  sys.wells = std::move(wells);
  return sys;
}

std::vector<WellTerm> well_terms(const WellSpec& well, const FlowSystem& sys, const Vector& pressure)
{
  std::vector<WellTerm> out;
  const double mu = sys.props.viscosity;
  if (well.control == WellControl::bhp) {
    for (const auto& c : well.completions)
      out.push_back({c.cv, c.wi / mu * (well.value - pressure[c.cv]), -c.wi / mu});
  } else {
    double total = 0.0;
    for (const auto& c : well.completions) total += c.wi;
    for (const auto& c : well.completions) out.push_back({c.cv, well.value * c.wi / total, 0.0});
  }
  return out;
}

double storage_coupling(const FlowSystem& sys, int cell, double dt)
{
  return sys.volume[static_cast<std::size_t>(cell)] * sys.props.biot / dt;
}

void assemble_flow_residual(const FlowSystem& sys, const FlowAssemblyInput& in, Vector& residual,
                            linalg::TripletList* jac, int offset)
{
  if (!in.steady && !(in.dt > 0.0)) throw ScheduleError("flow assembly requires dt > 0");
  const Vector& p = *in.pressure;
  const auto& props = sys.props;
  const double inv_mu = 1.0 / props.viscosity;
  const double rho = props.density;
  for (int i = 0; i < sys.size(); ++i) residual[offset + i] = 0.0;

  if (!in.steady) {
    const Vector& pn = *in.pressure_prev;
    const double s_m = props.inverse_biot_modulus();
    for (int i = 0; i < sys.size(); ++i) {
      const double v = sys.volume[static_cast<std::size_t>(i)];
      const double s = i < sys.n_matrix ? s_m : props.compressibility;
      residual[offset + i] += v * s * (p[i] - pn[i]) / in.dt;
      if (jac) jac->add(offset + i, offset + i, v * s / in.dt);
    }
    if (!in.div_u.empty())
      for (int c = 0; c < sys.n_matrix; ++c)
        residual[offset + c] += storage_coupling(sys, c, in.dt) *
                                (in.div_u[static_cast<std::size_t>(c)] - in.div_u_prev[static_cast<std::size_t>(c)]);
  }

  for (const auto& con : sys.connections) {
    if (con.type == ConnectionType::well_matrix || con.type == ConnectionType::well_fracture) continue;
    const int a = con.a;
    const int b = con.b;
    const double head = rho * props.gravity.dot(sys.position[static_cast<std::size_t>(a)] -
                                                sys.position[static_cast<std::size_t>(b)]);
    const double t = con.transmissibility * inv_mu;
    const double flux = t * (p[a] - p[b] - head);  // a -> b
    residual[offset + a] += flux;
    residual[offset + b] -= flux;
    if (jac) {
      jac->add(offset + a, offset + a, t);
      jac->add(offset + a, offset + b, -t);
      jac->add(offset + b, offset + a, -t);
      jac->add(offset + b, offset + b, t);
    }
  }

  for (const auto& well : sys.wells)
    for (const auto& w : well_terms(well, sys, p)) {
      residual[offset + w.cv] -= w.rate;
      if (jac && w.dq_dp != 0.0) jac->add(offset + w.cv, offset + w.cv, -w.dq_dp);
    }
}

namespace {

Vector newton_linear(const FlowSystem& sys, const FlowAssemblyInput& in, const Vector& guess,
                     const linalg::SolverOptions& options)
{
  // the flow residual is affine in pressure, so one Newton step is exact
  Vector p = guess;
  FlowAssemblyInput local = in;
  local.pressure = &p;
  Vector r(sys.size());
  linalg::TripletList jac(sys.size(), sys.size());
  assemble_flow_residual(sys, local, r, &jac, 0);
  const auto A = linalg::assemble(std::move(jac));
  p -= linalg::solve(A, r, options);
  return p;
}

}  // namespace

Vector solve_steady(const FlowSystem& sys, const linalg::SolverOptions& options)
{
  FlowAssemblyInput in;
  in.steady = true;
  return newton_linear(sys, in, Vector::Zero(sys.size()), options);
}

Vector step_flow(const FlowSystem& sys, const Vector& p_prev, double dt, const linalg::SolverOptions& options)
{
  FlowAssemblyInput in;
  in.pressure_prev = &p_prev;
  in.dt = dt;
  return newton_linear(sys, in, p_prev, options);
}

}  // namespace edfm::flow
