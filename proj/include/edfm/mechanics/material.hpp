#pragma once

#include "edfm/mesh/geometry.hpp"

#include <Eigen/Core>

namespace edfm::mechanics {

using mesh::Vec3;

/// Voigt order xx, yy, zz, xy, yz, xz; strains carry engineering shear.
using Voigt = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix63 = Eigen::Matrix<double, 6, 3>;
using Matrix36 = Eigen::Matrix<double, 3, 6>;

/// Solid and contact properties, SI units. Stresses are tension-positive.
struct MechProps
{
  double young = 1e9;   // E [Pa]
  double poisson = 0.25;
  double density = 0.0;  // bulk density [kg/m^3]; body force = density * gravity
  Vec3 gravity = Vec3::Zero();
  double biot = 1.0;
  double friction = 0.6;  // friction coefficient, tangent of the friction angle
  double dilation = 0.0;  // theta
  double cohesion = 0.0;  // initial q [Pa]
  double hardening = 0.0; // H [Pa/m]

  [[nodiscard]] double shear_modulus() const { return young / (2.0 * (1.0 + poisson)); }
  [[nodiscard]] double lame_lambda() const { return young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)); }
  [[nodiscard]] double bulk_modulus() const { return young / (3.0 * (1.0 - 2.0 * poisson)); }
  [[nodiscard]] Matrix6 stiffness() const;
  void validate() const;
};

/// Traction sigma.n as a linear map of the Voigt stress.
Matrix36 traction_operator(const Vec3& n);

/// Voigt strain of sym(a (x) g) as a linear map of a. Equals traction_operator(g)^T,
/// and is also the strain-displacement block of a node with gradient g.
inline Matrix63 sym_dyad(const Vec3& g) { return traction_operator(g).transpose(); }

inline Voigt voigt_identity() { return (Voigt() << 1, 1, 1, 0, 0, 0).finished(); }

Eigen::Matrix3d to_tensor(const Voigt& stress);
Voigt to_voigt(const Eigen::Matrix3d& stress);

}  // namespace edfm::mechanics
