#include "edfm/coupling/coupled.hpp"

#include "edfm/errors.hpp"
#include "edfm/io/format.hpp"
#include "edfm/units.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace edfm::coupling {

namespace {

mechanics::PressureView pressure_view(const CoupledModel& model, const Vector& p)
{
  const auto nm = static_cast<std::size_t>(model.flow.n_matrix);
  const auto nf = static_cast<std::size_t>(model.flow.n_fracture);
  return {std::span<const double>(p.data(), nm), std::span<const double>(p.data() + nm, nf)};
}

double mech_tolerance(const CoupledModel& model, const NewtonOptions& o)
{
  const double h = model.grid->min_spacing();
  return o.tol_mech * model.mech.props.young * h * h;
}

double flow_tolerance(const CoupledModel& model, double dt, const NewtonOptions& o)
{
  double vs = 0.0;
  const double s_m = model.flow.props.inverse_biot_modulus();
  for (int i = 0; i < model.flow.size(); ++i) {
    const double s = i < model.flow.n_matrix ? s_m : model.flow.props.compressibility;
    vs = std::max(vs, model.flow.volume[static_cast<std::size_t>(i)] * s);
  }
  return o.tol_flow * vs * 1e5 / dt;
}

/// Adds status changes between two iterates to the per-slot counters and
/// returns the total.
int count_flips(const ContactState& a, const ContactState& b, std::vector<int>& per_slot)
{
  int n = 0;
  std::size_t slot = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i, ++slot) {
      if (slot >= per_slot.size()) per_slot.push_back(0);
      if (a[k][i].status != b[k][i].status) {
        ++n;
        ++per_slot[slot];
      }
    }
  return n;
}

/// Solves J dx = r after row then column equilibration. Displacement and
/// pressure rows differ by many orders of magnitude, which would otherwise
/// defeat both pivoting and the relative residual check.
Vector solve_scaled(linalg::SparseMatrix J, const Vector& r, const linalg::SolverOptions& options)
{
  Vector dr = Vector::Zero(J.rows());
  for (int i = 0; i < J.outerSize(); ++i)
    for (linalg::SparseMatrix::InnerIterator it(J, i); it; ++it) dr[i] = std::max(dr[i], std::abs(it.value()));
  for (int i = 0; i < dr.size(); ++i) dr[i] = dr[i] > 0.0 ? 1.0 / dr[i] : 1.0;
  Vector dc = Vector::Zero(J.cols());
  for (int i = 0; i < J.outerSize(); ++i)
    for (linalg::SparseMatrix::InnerIterator it(J, i); it; ++it) {
      it.valueRef() *= dr[i];
      dc[it.col()] = std::max(dc[it.col()], std::abs(it.value()));
    }
  for (int j = 0; j < dc.size(); ++j) dc[j] = dc[j] > 0.0 ? 1.0 / dc[j] : 1.0;
  for (int i = 0; i < J.outerSize(); ++i)
    for (linalg::SparseMatrix::InnerIterator it(J, i); it; ++it) it.valueRef() *= dc[it.col()];
  const Vector y = linalg::solve(J, dr.cwiseProduct(r), options);
  return dc.cwiseProduct(y);
}

}  // namespace

CoupledModel build_coupled_model(CoupledModelInput in)
{
  in.mech.validate();
  in.flow.validate();
  if (std::abs(in.mech.biot - in.flow.biot) > 1e-12)
    throw ConfigError("mechanical and flow Biot coefficients differ");
  CoupledModel m;
  m.grid = std::make_unique<mesh::StructuredGrid>(std::move(in.grid));
  m.fractures = std::move(in.fractures);
  m.fm = std::make_unique<mesh::FractureMesh>(mesh::embed_all(*m.grid, m.fractures));
  const Voigt prestress = in.initial_stress + in.mech.biot * in.initial_pressure * mechanics::voigt_identity();
  m.mech = mechanics::build_mech_model(*m.grid, *m.fm, in.mech, prestress);
  std::vector<flow::WellSpec> wells;
  for (const auto& w : in.wells) wells.push_back(flow::resolve_well(w, *m.grid, *m.fm, in.flow.permeability));
  m.flow = flow::build_flow_system(*m.grid, *m.fm, m.fractures, in.flow, std::move(wells));
  m.bc = std::move(in.bc);
  if (m.bc.far_field.isZero()) m.bc.far_field = in.initial_stress;
  m.bc.validate(*m.grid);
  return m;
}

CoupledState initialize(const CoupledModel& model, double initial_pressure, const mechanics::MechSolveOptions& options)
{
  CoupledState s;
  s.time = 0.0;
  s.p = Vector::Constant(model.n_p(), initial_pressure);
  const auto sol = mechanics::solve_mechanics(model.mech, model.bc, pressure_view(model, s.p),
                                              mechanics::initial_contact_state(model.mech), options);
  s.u = sol.u;
  s.contact = sol.state;
  s.div_u = mechanics::volumetric_strain(model.mech, s.u);
  return s;
}

CoupledResidual assemble_coupled(const CoupledModel& model, const CoupledState& prev, const Vector& u,
                                 const Vector& p, double dt, linalg::TripletList* jac,
                                 const mechanics::LocalOptions& local)
{
  const int nu = model.n_u();
  const int nm = model.flow.n_matrix;
  CoupledResidual out;
  out.r = Vector::Zero(model.size());

  mechanics::BlockLayout layout;
  layout.u_offset = 0;
  layout.pm_offset = nu;
  layout.pf_offset = nu + nm;
  auto eq = mechanics::assemble_equilibrium(model.mech, u, prev.contact, pressure_view(model, p), model.bc, jac,
                                            layout, local);
  out.r.head(nu) = eq.residual;
  out.contact = std::move(eq.state);
  out.relaxed = eq.relaxed;

  const auto div = mechanics::volumetric_strain(model.mech, u);
  flow::FlowAssemblyInput fin;
  fin.pressure = &p;
  fin.pressure_prev = &prev.p;
  fin.div_u = div;
  fin.div_u_prev = prev.div_u;
  fin.dt = dt;
  flow::assemble_flow_residual(model.flow, fin, out.r, jac, nu);

  if (jac) {
    // storage change from the conforming volumetric strain
    for (int c = 0; c < nm; ++c) {
      const double k = flow::storage_coupling(model.flow, c, dt);
      if (k == 0.0) continue;
      const auto& Bbar = model.mech.strain_avg[static_cast<std::size_t>(model.mech.shape_id[static_cast<std::size_t>(c)])];
      const Eigen::Matrix<double, 1, 24> tr = Bbar.row(0) + Bbar.row(1) + Bbar.row(2);
      const auto d = model.mech.dofs(c);
      for (int j = 0; j < 24; ++j)
        if (tr[j] != 0.0) jac->add(nu + c, d[static_cast<std::size_t>(j)], k * tr[j]);
    }
  }
  return out;
}

StepReport step(const CoupledModel& model, const CoupledState& prev, double dt, const NewtonOptions& o,
                CoupledState& next)
{
  if (!(dt > 0.0)) throw ScheduleError("time step must be positive");
  const int nu = model.n_u();
  const int n = model.size();
  const double tol_u = mech_tolerance(model, o);
  const double tol_p = flow_tolerance(model, dt, o);
  StepReport rep;
  Vector u = prev.u;
  Vector p = prev.p;
  ContactState last = prev.contact;
  std::vector<int> flips;

  for (int it = 0; it <= o.max_iterations; ++it) {
    linalg::TripletList jac(n, n);
    CoupledResidual res;
    try {
      res = assemble_coupled(model, prev, u, p, dt, &jac, o.local);
    } catch (const ConvergenceError& e) {
      spdlog::debug("step: local contact solve failed: {}", e.what());
      return rep;
    }
    rep.iterations = it;
    rep.residual_mech = res.r.head(nu).lpNorm<Eigen::Infinity>();
    rep.residual_flow = res.r.tail(model.n_p()).lpNorm<Eigen::Infinity>();
    rep.history_mech.push_back(rep.residual_mech);
    rep.history_flow.push_back(rep.residual_flow);
    rep.relaxed = res.relaxed;
    if (it > 0) rep.status_flips += count_flips(last, res.contact, flips);
    last = res.contact;
    if (!flips.empty() && *std::max_element(flips.begin(), flips.end()) > o.max_status_flips) {
      spdlog::debug("step: contact status oscillates, giving up on this step");
      return rep;
    }
    spdlog::debug("  newton {}: |R_u| {:.3e} ({:.1e})  |R_p| {:.3e} ({:.1e})", it, rep.residual_mech, tol_u,
                  rep.residual_flow, tol_p);
    if (rep.residual_mech <= tol_u && rep.residual_flow <= tol_p) {
      rep.converged = true;
      next.time = prev.time + dt;
      next.u = u;
      next.p = p;
      next.contact = std::move(res.contact);
      next.div_u = mechanics::volumetric_strain(model.mech, u);
      return rep;
    }
    if (it == o.max_iterations) break;
    Vector dx;
    try {
      dx = solve_scaled(linalg::assemble(std::move(jac)), res.r, o.linear);
    } catch (const linalg::SolverError& e) {
      spdlog::debug("step: linear solve failed: {}", e.what());
      return rep;
    }
    u -= dx.head(nu);
    p -= dx.tail(model.n_p());
  }
  return rep;
}

std::vector<FractureStatusCount> fracture_status(const CoupledModel& model, const ContactState& contact)
{
  std::vector<FractureStatusCount> out(model.fractures.size());
  for (std::size_t k = 0; k < model.mech.fractured.size(); ++k) {
    const auto& e = model.mech.fractured[k];
    for (int i = 0; i < e.n_fractures; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const int f = model.fm->cvs[static_cast<std::size_t>(e.cv[ui])].fracture;
      auto& c = out[static_cast<std::size_t>(f)];
      const auto& js = contact[k][ui];
      switch (js.status) {
        case mechanics::FractureStatus::stick: ++c.stick; break;
        case mechanics::FractureStatus::slip: ++c.slip; break;
        case mechanics::FractureStatus::open: ++c.open; break;
      }
      const Vec3& nrm = e.normal[ui];
      const double ts = (js.traction - js.traction.dot(nrm) * nrm).norm();
      c.max_shear_traction = std::max(c.max_shear_traction, ts);
    }
  }
  return out;
}

std::vector<double> mean_shear_traction(const CoupledModel& model, const ContactState& contact)
{
  std::vector<double> sum(model.fractures.size(), 0.0);
  std::vector<double> area(model.fractures.size(), 0.0);
  for (std::size_t k = 0; k < model.mech.fractured.size(); ++k) {
    const auto& e = model.mech.fractured[k];
    for (int i = 0; i < e.n_fractures; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto& cv = model.fm->cvs[static_cast<std::size_t>(e.cv[ui])];
      const auto f = static_cast<std::size_t>(cv.fracture);
      const Vec3& nrm = e.normal[ui];
      const Vec3& t = contact[k][ui].traction;
      sum[f] += cv.area * (t - t.dot(nrm) * nrm).norm();
      area[f] += cv.area;
    }
  }
  for (std::size_t f = 0; f < sum.size(); ++f) sum[f] = area[f] > 0.0 ? sum[f] / area[f] : 0.0;
  return sum;
}

std::vector<RunLogEntry> run(const CoupledModel& model, CoupledState& state, const Schedule& sch,
                             const NewtonOptions& options, const StepObserver& observer)
{
  if (!(sch.end_time > state.time)) throw ScheduleError("end time must lie after the current time");
  if (!(sch.dt_initial > 0.0) || !(sch.dt_min > 0.0) || sch.dt_max < sch.dt_min)
    throw ScheduleError("inconsistent time-step limits");
  std::vector<double> marks = sch.report_times;
  marks.push_back(sch.end_time);
  std::sort(marks.begin(), marks.end());

  std::vector<RunLogEntry> log;
  double dt = std::min(sch.dt_initial, sch.dt_max);
  int cuts = 0;
  const double eps = 1e-9 * sch.end_time;
  while (state.time < sch.end_time - eps) {
    double h = dt;
    for (double m : marks)
      if (m > state.time + eps) {
        h = std::min(h, m - state.time);
        break;
      }
    CoupledState next;
    const StepReport rep = step(model, state, h, options, next);
    if (!rep.converged) {
      ++cuts;
      dt = h * sch.cut;
      spdlog::info("t = {:.4g} d: step of {:.4g} d failed after {} iterations, cutting", state.time / units::day,
                   h / units::day, rep.iterations);
      if (dt < sch.dt_min || cuts > sch.max_cuts)
        throw ConvergenceError("time step fell below the minimum at t = " + std::to_string(state.time) + " s",
                               std::max(rep.residual_mech, rep.residual_flow));
      continue;
    }
    state = std::move(next);
    RunLogEntry e;
    e.time = state.time;
    e.dt = h;
    e.newton_iterations = rep.iterations;
    e.cuts = cuts;
    e.relaxed = rep.relaxed;
    e.fractures = fracture_status(model, state.contact);
    e.history_mech = rep.history_mech;
    e.history_flow = rep.history_flow;
    log.push_back(e);
    if (observer) observer(state, e);
    cuts = 0;
    // grow only after an easy step
    dt = rep.iterations <= 6 ? std::min(sch.dt_max, h * sch.growth) : h;
  }
  return log;
}

void write_run_log(const std::vector<RunLogEntry>& log, const std::filesystem::path& path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "time_days,dt_days,newton_iterations,cuts,relaxed";
  const std::size_t nf = log.empty() ? 0 : log.front().fractures.size();
  for (std::size_t f = 0; f < nf; ++f)
    out << ",f" << f + 1 << "_stick,f" << f + 1 << "_slip,f" << f + 1 << "_open";
  out << ",residual_mech_history,residual_flow_history\n";
  auto history = [&](const std::vector<double>& h) {
    for (std::size_t i = 0; i < h.size(); ++i) out << (i ? ";" : "") << io::fmt_real(h[i]);
  };
  for (const auto& e : log) {
    out << io::fmt_real(e.time / units::day) << ',' << io::fmt_real(e.dt / units::day) << ',' << e.newton_iterations << ','
        << e.cuts << ',' << e.relaxed;
    for (const auto& c : e.fractures) out << ',' << c.stick << ',' << c.slip << ',' << c.open;
    out << ',';
    history(e.history_mech);
    out << ',';
    history(e.history_flow);
    out << '\n';
  }
}

}  // namespace edfm::coupling
