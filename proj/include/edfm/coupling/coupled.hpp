#pragma once

#include "edfm/flow/flow.hpp"
#include "edfm/mechanics/equilibrium.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace edfm::coupling {

using linalg::Vector;
using mesh::Vec3;
using mechanics::ContactState;
using mechanics::Voigt;

/// Everything that stays fixed during a coupled run. Owns the grid and the
/// fracture mesh that the mechanical model points into.
struct CoupledModel
{
  std::unique_ptr<mesh::StructuredGrid> grid;
  std::vector<mesh::FractureSurface> fractures;
  std::unique_ptr<mesh::FractureMesh> fm;
  mechanics::MechModel mech;
  flow::FlowSystem flow;
  mechanics::BoundaryConditionsMech bc;

  [[nodiscard]] int n_u() const { return mech.n_dofs(); }
  [[nodiscard]] int n_p() const { return flow.size(); }
  [[nodiscard]] int size() const { return n_u() + n_p(); }
};

struct CoupledModelInput
{
  mesh::StructuredGrid grid;
  std::vector<mesh::FractureSurface> fractures;
  mechanics::MechProps mech;
  flow::FlowProps flow;
  std::vector<flow::WellConfig> wells;
  mechanics::BoundaryConditionsMech bc;
  Voigt initial_stress = Voigt::Zero();  // total, at the initial pressure
  double initial_pressure = 0.0;
};

/// Builds the model. The mechanical prestress is the initial effective stress
/// S0 + b p0 I, so that u = 0 balances the initial total stress.
CoupledModel build_coupled_model(CoupledModelInput input);

struct CoupledState
{
  double time = 0.0;
  Vector u;
  Vector p;  // matrix cells, then fracture CVs
  ContactState contact;
  std::vector<double> div_u;
};

/// Elastic initialisation: pressures at p0, displacements equilibrated with
/// all fractures held at their trial contact state.
CoupledState initialize(const CoupledModel& model, double initial_pressure,
                        const mechanics::MechSolveOptions& options = {});

/// Residual [R_u; R_p] and, optionally, the monolithic Jacobian.
struct CoupledResidual
{
  Vector r;
  ContactState contact;
  int relaxed = 0;
};

CoupledResidual assemble_coupled(const CoupledModel& model, const CoupledState& prev, const Vector& u,
                                 const Vector& p, double dt, linalg::TripletList* jac,
                                 const mechanics::LocalOptions& local = {});

struct NewtonOptions
{
  int max_iterations = 25;
  int max_status_flips = 10;  // status changes of one element within a step before it is cut
  double tol_mech = 1e-8;   // on |R_u|, relative to E h^2
  double tol_flow = 1e-6;   // on |R_p|, relative to the storage of a 0.1 MPa change over dt
  linalg::SolverOptions linear = newton_linear_options();
  mechanics::LocalOptions local;

  /// Inexact Newton: the scaled block system only needs a few digits.
  static linalg::SolverOptions newton_linear_options()
  {
    linalg::SolverOptions o;
    o.tolerance = 1e-8;
    return o;
  }
};

struct StepReport
{
  bool converged = false;
  int iterations = 0;
  int status_flips = 0;  // element status changes over the Newton iterations
  std::vector<double> history_mech;  // |R_u|_inf per iteration [N]
  std::vector<double> history_flow;  // |R_p|_inf per iteration [m^3/s]
  double residual_mech = 0.0;
  double residual_flow = 0.0;
  int relaxed = 0;
};

/// One backward-Euler step. Returns the new state in `next` when converged.
StepReport step(const CoupledModel& model, const CoupledState& prev, double dt, const NewtonOptions& options,
                CoupledState& next);

struct Schedule
{
  double end_time = 0.0;
  double dt_initial = 86400.0;
  double dt_min = 60.0;
  double dt_max = 86400.0;
  double growth = 1.5;
  double cut = 0.5;
  int max_cuts = 10;             // consecutive cuts before giving up
  std::vector<double> report_times;  // steps are shortened to hit these exactly
};

/// Status summary of one fracture after a step.
struct FractureStatusCount
{
  int stick = 0;
  int slip = 0;
  int open = 0;
  double max_shear_traction = 0.0;  // [Pa]
};

std::vector<FractureStatusCount> fracture_status(const CoupledModel& model, const ContactState& contact);

/// Mean |t_tau| per fracture [Pa].
std::vector<double> mean_shear_traction(const CoupledModel& model, const ContactState& contact);

struct RunLogEntry
{
  double time = 0.0;
  double dt = 0.0;
  int newton_iterations = 0;
  int cuts = 0;
  int relaxed = 0;
  std::vector<FractureStatusCount> fractures;
  std::vector<double> history_mech;
  std::vector<double> history_flow;
};

using StepObserver = std::function<void(const CoupledState&, const RunLogEntry&)>;

/// Advances to schedule.end_time with step cutting on Newton failure.
/// Throws ConvergenceError when dt falls below dt_min.
std::vector<RunLogEntry> run(const CoupledModel& model, CoupledState& state, const Schedule& schedule,
                             const NewtonOptions& options, const StepObserver& observer = {});

void write_run_log(const std::vector<RunLogEntry>& log, const std::filesystem::path& path);

}  // namespace edfm::coupling
