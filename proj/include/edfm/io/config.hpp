#pragma once

#include "edfm/coupling/coupled.hpp"
#include "edfm/validation/validation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace edfm::io {

enum class ScenarioKind
{
  coupled,
  mech_validation,
  flow_validation
};

/// A fracture as written in a scenario file; `name` is what wells refer to.
struct FractureSpec
{
  std::string name;
  mesh::Vec3 center = mesh::Vec3::Zero();
  double length = 1.0;
  double height = 1.0;
  double strike_deg = 0.0;
  double dip_deg = 90.0;
  double conductivity_mdm = 0.0;
  double aperture = 1e-3;  // [m]
};

struct OutputSpec
{
  std::filesystem::path directory = "output";
  bool vtk = true;
  bool fracture_csv = true;
};

/// Parsed scenario, converted to SI. Only the sections that belong to `kind`
/// are populated from the file; the rest keep their defaults.
struct ScenarioConfig
{
  ScenarioKind kind = ScenarioKind::coupled;
  std::string name;
  std::filesystem::path source;

  mesh::GridConfig grid;
  std::vector<FractureSpec> fractures;
  mechanics::MechProps mech;
  flow::FlowProps flow;
  mechanics::BoundaryConditionsMech bc;
  mechanics::Voigt initial_stress = mechanics::Voigt::Zero();  // total, tension positive [Pa]
  double initial_pressure = 0.0;
  std::vector<flow::WellConfig> wells;  // fracture references resolved to indices
  coupling::Schedule schedule;
  coupling::NewtonOptions newton;
  OutputSpec output;

  validation::MechCaseConfig mech_case;
  validation::FlowCaseConfig flow_case;
};

/// Reads a YAML scenario. Unknown keys, missing required fields, bad units and
/// unresolved well completions raise ConfigError with "file:line: message".
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_string(const std::string& text, const std::string& source_name = "<string>");

coupling::CoupledModelInput make_model_input(const ScenarioConfig& config);

}  // namespace edfm::io
