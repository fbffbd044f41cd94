#pragma once

#include "edfm/mesh/basis.hpp"
#include "edfm/mesh/fracture.hpp"
#include "edfm/mesh/grid.hpp"

#include <filesystem>
#include <vector>

namespace edfm::mesh {

/// Intersection of one grid cell with one fracture. Index 1 denotes the part
/// of the cell behind the plane (opposite the normal), 2 the part in front.
struct FractureCut
{
  int cell = -1;
  int fracture = -1;
  Polygon polygon;  // clipped to the fracture rectangle
  double area = 0.0;
  double cell_volume = 0.0;
  double volume1 = 0.0;
  double volume2 = 0.0;
  Vec3 centroid1 = Vec3::Zero();
  Vec3 centroid2 = Vec3::Zero();
  Vec3 centroid_frac = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
  Vec3 plane_point = Vec3::Zero();  // point on the (possibly nudged) plane
  double dbar = 0.0;
  Vec3 ramp_gradient = Vec3::Zero();
};

/// Clips the bounded fracture plane against every cell it crosses with
/// nonzero area. Results are sorted by cell id. A fracture outside the domain
/// yields an empty list.
std::vector<FractureCut> embed_fracture(const StructuredGrid& grid, const FractureSurface& frac);

/// Volume-weighted mean distance between the cell halves and the fracture.
double compute_dbar(const FractureCut& cut);

/// Averaged ramp-function gradient for the element containing the cut.
Vec3 ramp_gradient(const ElementBasis& basis, const FractureCut& cut, const std::array<Vec3, 8>& nodes);

/// Debug dump: cell_id, frac_id, A, V1, V2, dbar, nx, ny, nz.
void write_cuts_csv(const std::vector<FractureCut>& cuts, const std::filesystem::path& path);

}  // namespace edfm::mesh
