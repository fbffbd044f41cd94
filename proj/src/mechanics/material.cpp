#include "edfm/mechanics/material.hpp"

#include "edfm/errors.hpp"

namespace edfm::mechanics {

Matrix6 MechProps::stiffness() const
{
  const double lam = lame_lambda();
  const double mu = shear_modulus();
  Matrix6 D = Matrix6::Zero();
  D.topLeftCorner<3, 3>().setConstant(lam);
  for (int i = 0; i < 3; ++i) D(i, i) += 2.0 * mu;
  for (int i = 3; i < 6; ++i) D(i, i) = mu;
  return D;
}

void MechProps::validate() const
{
  if (!(young > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5)) throw ConfigError("Poisson ratio must lie in (-1, 0.5)");
  if (!(friction >= 0.0)) throw ConfigError("friction coefficient must be non-negative");
  if (!(dilation >= 0.0)) throw ConfigError("dilation coefficient must be non-negative");
  if (!(cohesion >= 0.0)) throw ConfigError("cohesion must be non-negative");
  if (!(hardening >= 0.0)) throw ConfigError("hardening modulus must be non-negative");
}

Matrix36 traction_operator(const Vec3& n)
{
  Matrix36 N;
  N << n.x(), 0, 0, n.y(), 0, n.z(),  //
      0, n.y(), 0, n.x(), n.z(), 0,   //
      0, 0, n.z(), 0, n.y(), n.x();
  return N;
}

Eigen::Matrix3d to_tensor(const Voigt& s)
{
  Eigen::Matrix3d t;
  t << s[0], s[3], s[5],  //
      s[3], s[1], s[4],   //
      s[5], s[4], s[2];
  return t;
}

Voigt to_voigt(const Eigen::Matrix3d& t)
{
  return (Voigt() << t(0, 0), t(1, 1), t(2, 2), t(0, 1), t(1, 2), t(0, 2)).finished();
}

}  // namespace edfm::mechanics
