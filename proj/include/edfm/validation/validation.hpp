#pragma once

#include "edfm/flow/flow.hpp"
#include "edfm/mechanics/equilibrium.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace edfm::validation {

/// Inclined fracture under uniaxial compression. x is measured along the
/// fracture from one tip, in [0, 2 l]; l is the half-length.
struct SlipReference
{
  double young = 1e9;
  double poisson = 0.25;
  double friction = 0.6;
  double load = 10e6;       // compressive magnitude [Pa]
  double angle_deg = 30.0;  // between fracture and load axis
  double half_length = 5.0;
};

/// Pressurised (or remotely pulled) straight crack.
struct ApertureReference
{
  double shear_modulus = 400e6;
  double poisson = 0.25;
  double load = 10e6;  // tensile magnitude [Pa]
  double half_length = 5.0;
};

double analytical_slip(double x, const SlipReference& ref);
/// (1 - nu) / G * load * sqrt(l^2 - (x - l)^2): the displacement of one crack
/// face, i.e. half the total opening.
double analytical_aperture(double x, const ApertureReference& ref);

struct ProfileSample
{
  double x = 0.0;
  double width = 0.0;  // arc length represented by the sample
  double value = 0.0;
};

/// sqrt(sum w_i (v_i - ref(x_i))^2) / max |ref|, w_i = width_i / sum width.
double l2_error(const std::vector<ProfileSample>& profile, const std::function<double(double)>& reference);

struct ConvergencePoint
{
  double h = 0.0;
  int n_fracture_cells = 0;
  double error = 0.0;
  double computed_max = 0.0;
  double reference_max = 0.0;
  int newton_iterations = 0;
  int cells = 0;
};

struct ConvergenceReport
{
  std::string test;
  std::vector<ConvergencePoint> points;
  double exponent = 0.0;
};

/// Least-squares slope of log(error) against log(h). Needs three points.
double fit_convergence(const std::vector<ConvergencePoint>& points);

enum class MechCase
{
  shear,
  opening
};

struct MechCaseConfig
{
  MechCase kind = MechCase::shear;
  bool conforming = true;
  std::vector<int> n_fracture_cells{4, 8, 16, 32};  // conforming levels
  std::vector<double> spacings{2.5, 1.25, 0.625};     // non-conforming levels
  std::vector<double> angles_deg{30.0};
  mechanics::MechProps props;  // elastic and contact properties
  double load = 10e6;
  double fracture_length = 10.0;
  double domain = 200.0;
  double thickness = 10.0;
  double margin = 2.5;  // fine-zone padding around the fracture [m]
  double growth = 1.15;
  /// Multiplier applied to the opening reference; 2 compares total jumps.
  double aperture_reference_factor = 2.0;
  std::filesystem::path profile_dir;  // optional per-level profile CSVs
};

/// Table values: E = 1 GPa, nu = 0.25, mu = 0.6, no dilation, cohesion or hardening.
mechanics::MechProps reference_mech_props();

std::vector<ConvergenceReport> run_mech_case(const MechCaseConfig& config);

/// Table values (k = 10 mD, porosity 0.2) plus the fluid choices of this harness.
flow::FlowProps reference_flow_props();

struct FlowCaseConfig
{
  std::vector<double> spacings{4.0, 2.0, 1.0, 0.5};
  double reference_spacing = 0.25;
  double transient_spacing = 1.0;
  double transient_days = 40.0;
  int transient_steps = 80;
  std::vector<double> snapshot_days{10.0, 20.0, 40.0};
  flow::FlowProps props = reference_flow_props();
  double fracture_length = 160.0;
  double fracture_strike_deg = 140.0;
  double conductivity_mdm = 20.0;
  double initial_pressure = 10e6;
  double injector_bhp = 15e6;
  double producer_bhp = 5e6;
  double well_offset = 10.0;  // distance of the wells from the domain sides [m]
  double domain = 200.0;
  double thickness = 10.0;
  linalg::SolverOptions linear;
  std::filesystem::path profile_dir;
};

struct FlowCaseResult
{
  ConvergenceReport report;
  double p_min = 0.0;  // over all levels and the transient [Pa]
  double p_max = 0.0;
  /// Fracture pressure at every CV is non-increasing over the snapshots
  /// followed by the steady state.
  bool transient_monotone = false;
  double snapshot_max_rise = 0.0;      // largest increase between consecutive snapshots [Pa]
  double transient_max_rise = 0.0;     // largest increase of any fracture CV over one step [Pa]
  std::vector<double> transient_mean;  // mean fracture pressure per step
  std::vector<std::vector<ProfileSample>> snapshots;  // at snapshot_days, then steady
};

FlowCaseResult run_flow_case(const FlowCaseConfig& config);

void write_report_csv(const ConvergenceReport& report, const std::filesystem::path& path);

}  // namespace edfm::validation
