#include "edfm/mesh/fracture.hpp"

#include "edfm/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace edfm::mesh {

FractureSurface make_fracture(int id, const Vec3& center, double length, double height, double strike_deg,
                              double dip_deg, double conductivity, double aperture)
{
  if (!(length > 0.0) || !(height > 0.0)) throw ConfigError("fracture dimensions must be positive");
  if (!(dip_deg > 0.0 && dip_deg <= 90.0)) throw ConfigError("fracture dip must lie in (0, 90] degrees");
  if (conductivity < 0.0) throw ConfigError("fracture conductivity must be non-negative");
  if (!(aperture > 0.0)) throw ConfigError("fracture aperture must be positive");

  FractureSurface f;
  f.id = id;
  f.center = center;
  f.length = length;
  f.height = height;
  f.strike = std::fmod(std::fmod(strike_deg, 360.0) + 360.0, 360.0);
  f.dip = dip_deg;
  f.conductivity = conductivity;
  f.aperture = aperture;

  const double phi = f.strike * std::numbers::pi / 180.0;
  const double delta = f.dip * std::numbers::pi / 180.0;
  f.tangent1 = Vec3(std::cos(phi), std::sin(phi), 0.0);
  const Vec3 right(std::sin(phi), -std::cos(phi), 0.0);
  f.tangent2 = (std::cos(delta) * right - std::sin(delta) * Vec3::UnitZ()).normalized();
  f.normal = f.tangent1.cross(f.tangent2).normalized();
  return f;
}

Vec3 fracture_point(const FractureSurface& f, double s, double d)
{
  return f.center + (s - 0.5 * f.length) * f.tangent1 + d * f.tangent2;
}

double arc_coordinate(const FractureSurface& f, const Vec3& x)
{
  return (x - f.center).dot(f.tangent1) + 0.5 * f.length;
}

}  // namespace edfm::mesh
