#pragma once

#include "edfm/mechanics/material.hpp"

#include <Eigen/Core>

#include <array>
#include <string_view>

namespace edfm::mechanics {

inline constexpr int kMaxFracturesPerElement = 2;

enum class FractureStatus
{
  stick = 0,
  slip = 1,
  open = 2
};

std::string_view status_name(FractureStatus s);

/// Contact state of one fracture inside one element. The jump is stored in
/// global coordinates; its normal part is the opening, the rest is slip.
struct JumpState
{
  Vec3 jump = Vec3::Zero();
  double q = 0.0;        // current cohesion / hardening variable [Pa]
  double dlambda = 0.0;  // plastic multiplier increment of the last step [m]
  double slip = 0.0;     // accumulated plastic multiplier [m]
  FractureStatus status = FractureStatus::stick;
  Vec3 traction = Vec3::Zero();  // contact traction t [Pa]
};

struct TractionVector
{
  double normal = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  [[nodiscard]] double shear() const;
};

TractionVector frame_traction(const Vec3& t, const Vec3& n, const Vec3& tau1, const Vec3& tau2);

/// Inputs of the element-level contact problem. The conforming strain and
/// pressures are frozen; only the jumps and multipliers are solved for.
struct LocalProblem
{
  int n_fractures = 1;
  std::array<Vec3, kMaxFracturesPerElement> normal{};
  std::array<Vec3, kMaxFracturesPerElement> ramp{};  // averaged ramp gradient
  std::array<JumpState, kMaxFracturesPerElement> prev{};
  Voigt strain = Voigt::Zero();  // averaged conforming strain
  Voigt prestress = Voigt::Zero();  // initial effective stress
  double p_matrix = 0.0;
  std::array<double, kMaxFracturesPerElement> p_fracture{};
  int cell = -1;  // for diagnostics
};

struct LocalSolution
{
  std::array<JumpState, kMaxFracturesPerElement> state{};
  Voigt sigma_bar = Voigt::Zero();
  int iterations = 0;
  double residual = 0.0;
  /// No candidate met its sign conditions exactly; the least violating one was taken.
  bool relaxed = false;
  /// d jump_i / d (strain[6], p_M, p_F,1 .. p_F,nF); rows 3i..3i+2.
  Eigen::MatrixXd sensitivity;
};

struct LocalOptions
{
  int max_iterations = 50;
  double tolerance = 1e-4;  // [Pa]
};

/// Solves the element contact problem: stick, slip (Coulomb with dilation
/// and linear hardening) or open for each embedded fracture, and returns the
/// jump sensitivities from the implicit-function theorem.
LocalSolution local_return_mapping(const MechProps& props, const LocalProblem& problem,
                                   const LocalOptions& options = {});

/// Yield function F = |t_tau| + mu t_n - q (tension positive).
double slip_function(const MechProps& props, const Vec3& traction, const Vec3& normal, double q);

}  // namespace edfm::mechanics
