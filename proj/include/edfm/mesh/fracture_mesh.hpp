#pragma once

#include "edfm/mesh/embedding.hpp"

#include <vector>

namespace edfm::mesh {

/// Fracture control volume: one per FractureCut.
struct FractureCV
{
  int fracture = -1;  // index into the fracture list
  int cell = -1;
  int cut = -1;  // index into FractureMesh::cuts
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  double arc = 0.0;        // strike coordinate of the centroid
  double arc_extent = 0.0; // length of the CV projected on the strike direction
};

/// Shared polygon edge between two CVs of the same fracture.
struct CVAdjacency
{
  int cv_a = -1;
  int cv_b = -1;
  double edge_length = 0.0;
  Vec3 edge_midpoint = Vec3::Zero();
  Vec3 edge_direction = Vec3::Zero();
};

/// Part of a fracture CV on one side of an intersection line.
struct SubSegment
{
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  double distance = 0.0;  // centroid to intersection line
};

/// Two CVs of different fractures crossing inside one cell. The first CV is
/// split into parts [0] = F11 and [1] = F12, the second into F21 and F22.
struct IntersectionRecord
{
  int cv1 = -1;
  int cv2 = -1;
  int cell = -1;
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  double length = 0.0;
  std::array<SubSegment, 2> parts1;
  std::array<SubSegment, 2> parts2;
};

struct FractureMesh
{
  std::vector<FractureCut> cuts;               // all cuts, fracture-major
  std::vector<FractureCV> cvs;                 // cvs[i] <-> cuts[i]
  std::vector<std::vector<int>> by_fracture;   // CV ids per fracture, ascending cell id
  std::vector<CVAdjacency> adjacency;          // a < b
  std::vector<IntersectionRecord> intersections;

  [[nodiscard]] int n_cvs() const { return static_cast<int>(cvs.size()); }
  /// CV ids located in a cell (at most one per fracture).
  [[nodiscard]] std::vector<int> cvs_in_cell(int cell) const;
};

FractureMesh build_fracture_mesh(const StructuredGrid& grid, std::vector<std::vector<FractureCut>> cuts,
                                 const std::vector<FractureSurface>& fractures);

/// Convenience: embed every fracture, then build the fracture mesh.
FractureMesh embed_all(const StructuredGrid& grid, const std::vector<FractureSurface>& fractures);

}  // namespace edfm::mesh
