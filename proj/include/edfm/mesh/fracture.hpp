#pragma once

#include "edfm/mesh/geometry.hpp"

namespace edfm::mesh {

/// Planar rectangular fracture. Strike is measured counter-clockwise from the
/// x axis in the horizontal plane; dip is the inclination from horizontal.
/// tangent1 runs along strike, tangent2 down-dip, normal = tangent1 x tangent2.
struct FractureSurface
{
  int id = 0;
  Vec3 center = Vec3::Zero();
  double length = 1.0;  // along strike [m]
  double height = 1.0;  // along dip [m]
  double strike = 0.0;  // [deg]
  double dip = 90.0;    // [deg]
  Vec3 normal = Vec3::UnitY();
  Vec3 tangent1 = Vec3::UnitX();
  Vec3 tangent2 = -Vec3::UnitZ();
  double conductivity = 0.0;  // k_F * w [mD m]
  double aperture = 1e-3;     // [m]
};

FractureSurface make_fracture(int id, const Vec3& center, double length, double height, double strike_deg,
                              double dip_deg, double conductivity = 0.0, double aperture = 1e-3);

/// Point at strike coordinate s in [0, length] and dip coordinate 0 at mid-height.
Vec3 fracture_point(const FractureSurface& f, double s, double d = 0.0);

/// Arc-length coordinate along strike measured from the tip at -length/2.
double arc_coordinate(const FractureSurface& f, const Vec3& x);

}  // namespace edfm::mesh
