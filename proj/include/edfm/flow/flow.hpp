#pragma once

#include "edfm/linalg/sparse.hpp"
#include "edfm/mesh/fracture_mesh.hpp"
#include "edfm/mesh/grid.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace edfm::flow {

using mesh::Vec3;
using linalg::Vector;

/// Rock and fluid properties, SI units.
struct FlowProps
{
  Vec3 permeability{1e-15, 1e-15, 1e-15};  // diagonal k_M [m^2]
  double porosity = 0.2;
  double compressibility = 1e-9;  // c_f [1/Pa]
  double viscosity = 1e-3;        // [Pa s]
  double density = 1000.0;        // [kg/m^3]
  double biot = 1.0;
  double bulk_modulus = 1e9;  // drained K [Pa]
  Vec3 gravity = Vec3::Zero();

  /// Coefficient of dp/dt in the matrix balance: phi c_f + (1-b)(b-phi)/K.
  /// This is the reciprocal of the conventional Biot modulus.
  [[nodiscard]] double inverse_biot_modulus() const;
  void validate() const;
};

enum class ConnectionType
{
  matrix_matrix,
  matrix_fracture,
  fracture_adjacent,
  fracture_intersection,
  well_matrix,
  well_fracture
};

/// Two-point connection between control volumes. Control volumes are numbered
/// matrix cells first, then fracture CVs. For well connections `b` is the well
/// index. Transmissibility is geometric [m^3].
struct Connection
{
  ConnectionType type;
  int a;
  int b;
  double transmissibility;
};

using ConnectionList = std::vector<Connection>;

std::vector<Connection> mm_transmissibility(const mesh::StructuredGrid& grid, const Vec3& permeability);

/// 2 A (n.k.n) / dbar.
double mf_transmissibility(const mesh::FractureCut& cut, const Vec3& permeability);

/// TPFA across the shared edge of two CVs of one fracture with conductivities
/// [m^3] (k_F w). Symmetric in argument order.
double ff_adjacent_transmissibility(const mesh::FractureCV& a, const mesh::FractureCV& b,
                                    const mesh::CVAdjacency& edge, const Vec3& normal, double conductivity_a,
                                    double conductivity_b);

/// Star-delta reduction of the four half-segment transmissibilities meeting
/// at the intersection line.
double ff_intersection_transmissibility(const mesh::IntersectionRecord& rec, double conductivity1,
                                        double conductivity2);

/// Same reduction from explicit half-segment transmissibilities.
double star_delta(const std::array<double, 2>& alpha1, const std::array<double, 2>& alpha2);

enum class WellControl
{
  bhp,
  rate
};

struct WellCompletion
{
  int cv;     // global control-volume index
  double wi;  // geometric well index [m^3]
};

struct WellSpec
{
  std::string name;
  WellControl control = WellControl::bhp;
  double value = 0.0;  // BHP [Pa] or injection rate [m^3/s] (negative = production)
  std::vector<WellCompletion> completions;
};

/// Where a well sits and how it is completed, before resolution to CV indices.
struct WellConfig
{
  std::string name;
  WellControl control = WellControl::bhp;
  double value = 0.0;
  Vec3 location = Vec3::Zero();       // x, y used; vertical trajectory
  double z_top = 1e300;
  double z_bottom = -1e300;
  std::vector<int> fractures;         // complete in these fracture indices (empty: matrix)
  double radius = 0.01;               // [m]
  double skin = 0.0;
};

/// Peaceman equivalent-radius well index for a matrix cell [m^3].
double peaceman_well_index(const Vec3& cell_size, const Vec3& permeability, double radius, double skin);

inline constexpr double kFractureWellIndexMdM = 1e5;

WellSpec resolve_well(const WellConfig& config, const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                      const Vec3& permeability);

/// Static flow discretization.
struct FlowSystem
{
  FlowProps props;
  int n_matrix = 0;
  int n_fracture = 0;
  std::vector<double> volume;     // per CV: cell volume, or A * aperture for fractures
  std::vector<Vec3> position;     // per CV
  ConnectionList connections;
  std::vector<WellSpec> wells;

  [[nodiscard]] int size() const { return n_matrix + n_fracture; }
};

ConnectionList build_connections(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                                 const std::vector<mesh::FractureSurface>& fractures, const FlowProps& props);

FlowSystem build_flow_system(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                             const std::vector<mesh::FractureSurface>& fractures, const FlowProps& props,
                             std::vector<WellSpec> wells);

/// Pressures [Pa], matrix cells then fracture CVs.
struct FlowState
{
  Vector pressure;
};

struct WellTerm
{
  int cv;
  double rate;   // into the CV [m^3/s]
  double dq_dp;  // derivative w.r.t. the CV pressure
};

std::vector<WellTerm> well_terms(const WellSpec& well, const FlowSystem& sys, const Vector& pressure);

/// Residual rows (outflow + accumulation - sources, [m^3/s]) written at
/// `offset` of `residual`; Jacobian w.r.t. pressures into `jac` with the same
/// row/column offset. With `steady` the accumulation terms are dropped.
/// div_u is the per-cell volumetric strain.
struct FlowAssemblyInput
{
  const Vector* pressure = nullptr;
  const Vector* pressure_prev = nullptr;
  std::span<const double> div_u;
  std::span<const double> div_u_prev;
  double dt = 0.0;
  bool steady = false;
};

void assemble_flow_residual(const FlowSystem& sys, const FlowAssemblyInput& in, Vector& residual,
                            linalg::TripletList* jac, int offset);

/// d(residual of cell)/d(div u of cell) = V b / dt.
double storage_coupling(const FlowSystem& sys, int cell, double dt);

/// Solve the steady problem (accumulation dropped) directly.
Vector solve_steady(const FlowSystem& sys, const linalg::SolverOptions& options = {});

/// Advance the uncoupled flow problem by one backward-Euler step.
Vector step_flow(const FlowSystem& sys, const Vector& p_prev, double dt, const linalg::SolverOptions& options = {});

}  // namespace edfm::flow
