#pragma once

#include "edfm/linalg/sparse.hpp"
#include "edfm/mechanics/sda.hpp"
#include "edfm/mesh/basis.hpp"
#include "edfm/mesh/fracture_mesh.hpp"
#include "edfm/mesh/grid.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace edfm::mechanics {

using linalg::TripletList;
using linalg::Vector;
using Matrix6x24 = Eigen::Matrix<double, 6, 24>;
using Matrix24 = Eigen::Matrix<double, 24, 24>;

/// Boundary condition on one side of the box. Components with a prescribed
/// displacement are constrained; the others carry `traction` (total, Pa),
/// or the far-field stress times the outward normal when `far_field` is set.
struct FaceBC
{
  mesh::Side side = mesh::Side::xmin;
  std::array<std::optional<double>, 3> displacement{};
  Vec3 traction = Vec3::Zero();
  bool far_field = false;
};

/// Single-node displacement constraint, used to remove rigid-body modes.
struct NodeConstraint
{
  int node = 0;
  int component = 0;
  double value = 0.0;
};

struct BoundaryConditionsMech
{
  std::vector<FaceBC> faces;
  std::vector<NodeConstraint> pins;
  Voigt far_field = Voigt::Zero();  // total stress

  void validate(const mesh::StructuredGrid& grid) const;
};

/// Element crossed by one or two fractures.
struct FracturedElement
{
  int cell = -1;
  int n_fractures = 0;
  std::array<int, kMaxFracturesPerElement> cv{-1, -1};
  std::array<Vec3, kMaxFracturesPerElement> normal{};
  std::array<Vec3, kMaxFracturesPerElement> ramp{};  // volume average
  /// sum_g B_g^T D sym(ramp_gradient_g) jxw: internal force per unit jump.
  std::array<Eigen::Matrix<double, 24, 3>, kMaxFracturesPerElement> coupling{};
};

/// Static finite-element data of the mechanical problem.
struct MechModel
{
  const mesh::StructuredGrid* grid = nullptr;
  const mesh::FractureMesh* fractures = nullptr;
  MechProps props;
  Voigt prestress = Voigt::Zero();  // initial effective stress

  std::vector<FracturedElement> fractured;
  std::vector<int> fractured_index;  // per cell, -1 if intact
  std::vector<int> shape_id;         // per cell, index into shapes
  std::vector<mesh::ElementBasis> shapes;
  std::vector<Matrix24> stiffness;   // intact element stiffness per shape
  std::vector<Matrix6x24> strain_avg;  // averaged strain operator per shape

  [[nodiscard]] int n_dofs() const { return 3 * grid->n_nodes(); }
  [[nodiscard]] std::array<int, 24> dofs(int cell) const;
};

/// Builds element data. Throws ConfigError when an element hosts more than
/// two fractures.
MechModel build_mech_model(const mesh::StructuredGrid& grid, const mesh::FractureMesh& fm,
                           const MechProps& props, const Voigt& prestress = Voigt::Zero());

/// Contact state of all fractured elements at the last converged step.
using ContactState = std::vector<std::array<JumpState, kMaxFracturesPerElement>>;

ContactState initial_contact_state(const MechModel& model);

struct PressureView
{
  std::span<const double> matrix;    // per cell
  std::span<const double> fracture;  // per fracture CV
};

/// Where the blocks of the tangent go inside a larger system.
struct BlockLayout
{
  int u_offset = 0;
  int pm_offset = -1;  // column of p_M(cell 0); negative = not assembled
  int pf_offset = -1;  // column of p_F(cv 0)
};

struct EquilibriumResult
{
  Vector residual;  // size n_dofs, Dirichlet rows scaled by `dirichlet_scale`
  ContactState state;
  std::vector<Voigt> sigma_bar;  // averaged effective stress per fractured element
  int relaxed = 0;               // local solves that fell back to the least-violating state
  double dirichlet_scale = 1.0;
};

/// Momentum balance residual R(u, p) = f_int - f_ext with Dirichlet rows
/// replaced by scale * (u - u_bc). When `jac` is given, the consistent
/// tangent dR/du, dR/dp_M and dR/dp_F is appended at `layout`.
EquilibriumResult assemble_equilibrium(const MechModel& model, const Vector& u, const ContactState& prev,
                                       const PressureView& p, const BoundaryConditionsMech& bc,
                                       TripletList* jac = nullptr, const BlockLayout& layout = {},
                                       const LocalOptions& local = {});

/// Per-dof Dirichlet value, NaN where free.
Vector dirichlet_values(const MechModel& model, const BoundaryConditionsMech& bc);

/// Averaged conforming volumetric strain per cell.
std::vector<double> volumetric_strain(const MechModel& model, const Vector& u);

struct MechSolveOptions
{
  int max_iterations = 40;
  double tolerance = 1e-8;  // relative to the load scale E h^2
  linalg::SolverOptions linear;
  LocalOptions local;
};

struct MechSolveResult
{
  Vector u;
  ContactState state;
  std::vector<double> residual_history;
  int iterations = 0;
  int relaxed = 0;
};

/// Newton solve of the momentum balance at frozen pressures.
MechSolveResult solve_mechanics(const MechModel& model, const BoundaryConditionsMech& bc, const PressureView& p,
                                const ContactState& prev, const MechSolveOptions& options = {},
                                const Vector* u0 = nullptr);

/// Jump along one fracture, one entry per CV sorted by arc coordinate.
struct ProfilePoint
{
  int cv = -1;
  double arc = 0.0;
  double slip = 0.0;     // tangential jump along strike
  double opening = 0.0;  // normal jump
  FractureStatus status = FractureStatus::stick;
};

std::vector<ProfilePoint> fracture_profile(const MechModel& model, const ContactState& state, int fracture);

}  // namespace edfm::mechanics
