#pragma once

#include "edfm/coupling/coupled.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace edfm::validation {

using mechanics::Voigt;
using mesh::Vec3;

/// One fracture of the nine-fracture injection scenario.
struct DemoFracture
{
  Vec3 center = Vec3::Zero();  // x, y; z is mid-thickness
  double length = 60.0;
  double strike_deg = 0.0;
  double dip_deg = 90.0;
};

/// Injection into the longest of nine fractures in an anisotropically
/// stressed box, with four corner producers. Coordinates are centred on the
/// injector; the layout beyond the tabulated lengths and orientations is our own.
struct DemoConfig
{
  int cells_xy = 50;
  int cells_z = 4;
  double domain = 200.0;
  double thickness = 10.0;
  std::vector<DemoFracture> fractures = default_layout();
  double conductivity_mdm = 20.0;
  mechanics::MechProps mech;
  flow::FlowProps flow;
  Voigt initial_stress = Voigt::Zero();  // total, tension positive
  double initial_pressure = 10e6;
  double injection_rate = 50.0 / 86400.0;  // [m^3/s]
  double producer_bhp = 10e6;
  double well_offset = 10.0;  // producers sit this far from both walls
  double end_days = 60.0;
  std::vector<double> snapshot_days{27.0, 31.0, 33.0, 34.0, 60.0};  // written only with output_dir
  coupling::Schedule schedule;  // end_time is overwritten from end_days
  coupling::NewtonOptions newton;
  std::optional<std::filesystem::path> output_dir;

  DemoConfig();
  static std::vector<DemoFracture> default_layout();
};

struct DemoResult
{
  std::vector<double> initial_shear;  // area-weighted mean |t_tau| per fracture [Pa]
  std::vector<double> activation_day;  // first step with any SLIP or OPEN element; negative if never
  std::vector<double> opening_day;     // first step with any OPEN element; negative if never
  std::vector<coupling::RunLogEntry> log;
  double injector_pressure_end = 0.0;  // mean fracture pressure at the injector [Pa]
};

coupling::CoupledModelInput build_demo_input(const DemoConfig& config);

/// Runs initialisation and the injection period. With output_dir set, writes
/// the run log, the per-fracture activation summary and a VTK/CSV snapshot
/// at every snapshot day.
DemoResult run_demo(const DemoConfig& config, const coupling::StepObserver& observer = {});

}  // namespace edfm::validation
