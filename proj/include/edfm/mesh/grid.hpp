#pragma once

#include "edfm/mesh/geometry.hpp"

#include <array>
#include <optional>
#include <vector>

namespace edfm::mesh {

/// Uniform grid request as it appears in a scenario file.
struct GridConfig
{
  std::array<int, 3> cells{1, 1, 1};
  Vec3 extent{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
};

enum class Side
{
  xmin,
  xmax,
  ymin,
  ymax,
  zmin,
  zmax
};

/// Face shared by two cells along `axis` (cell_lo has the lower index).
struct InteriorFace
{
  int cell_lo;
  int cell_hi;
  int axis;
  double area;
};

struct BoundaryFace
{
  int cell;
  Side side;
  std::array<int, 4> nodes;
  double area;
};

/// Rectilinear hexahedral grid: cell (i,j,k) spans [x_i,x_{i+1}] x [y_j,y_{j+1}] x [z_k,z_{k+1}].
/// Node ordering inside a cell follows the VTK hexahedron convention.
class StructuredGrid
{
 public:
  StructuredGrid(std::vector<double> x, std::vector<double> y, std::vector<double> z);

  static StructuredGrid uniform(const std::array<int, 3>& cells, const Vec3& extent, const Vec3& origin);

  [[nodiscard]] int nx() const { return static_cast<int>(coords_[0].size()) - 1; }
  [[nodiscard]] int ny() const { return static_cast<int>(coords_[1].size()) - 1; }
  [[nodiscard]] int nz() const { return static_cast<int>(coords_[2].size()) - 1; }
  [[nodiscard]] int n_cells() const { return nx() * ny() * nz(); }
  [[nodiscard]] int n_nodes() const { return (nx() + 1) * (ny() + 1) * (nz() + 1); }
  [[nodiscard]] const std::vector<double>& coords(int axis) const { return coords_[static_cast<std::size_t>(axis)]; }

  [[nodiscard]] int cell_index(int i, int j, int k) const { return i + nx() * (j + ny() * k); }
  [[nodiscard]] std::array<int, 3> cell_ijk(int cell) const;
  [[nodiscard]] int node_index(int i, int j, int k) const { return i + (nx() + 1) * (j + (ny() + 1) * k); }
  [[nodiscard]] std::array<int, 3> node_ijk(int node) const;

  [[nodiscard]] Vec3 node(int n) const;
  [[nodiscard]] std::array<int, 8> cell_nodes(int cell) const;
  [[nodiscard]] std::array<Vec3, 8> cell_node_coords(int cell) const;
  [[nodiscard]] Vec3 cell_lo(int cell) const;
  [[nodiscard]] Vec3 cell_hi(int cell) const;
  [[nodiscard]] Vec3 cell_center(int cell) const { return 0.5 * (cell_lo(cell) + cell_hi(cell)); }
  [[nodiscard]] Vec3 cell_size(int cell) const { return cell_hi(cell) - cell_lo(cell); }
  [[nodiscard]] double cell_volume(int cell) const { return cell_size(cell).prod(); }
  [[nodiscard]] Polyhedron cell_polyhedron(int cell) const { return make_box(cell_lo(cell), cell_hi(cell)); }

  [[nodiscard]] Vec3 lo() const { return {coords_[0].front(), coords_[1].front(), coords_[2].front()}; }
  [[nodiscard]] Vec3 hi() const { return {coords_[0].back(), coords_[1].back(), coords_[2].back()}; }
  [[nodiscard]] double min_spacing() const { return min_spacing_; }

  /// Cell containing p; points on an interior face go to the lower cell.
  [[nodiscard]] std::optional<int> locate(const Vec3& p) const;
  /// Index range [first, last] of cells along `axis` overlapping [a, b].
  [[nodiscard]] std::array<int, 2> cell_range(int axis, double a, double b) const;

  [[nodiscard]] const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  [[nodiscard]] std::vector<BoundaryFace> boundary_faces(Side side) const;
  /// Neighbour across face `side` of a cell, if any.
  [[nodiscard]] std::optional<int> neighbor(int cell, Side side) const;

 private:
  std::array<std::vector<double>, 3> coords_;
  std::vector<InteriorFace> interior_faces_;
  double min_spacing_ = 0.0;
};

StructuredGrid build_cartesian_grid(const GridConfig& config);

/// One axis of a graded grid: uniform spacing `h` on [fine_lo, fine_hi], then
/// geometric growth (ratio `growth`) out to [lo, hi]. `fine_lo` is a node.
std::vector<double> graded_axis(double lo, double hi, double fine_lo, double fine_hi, double h, double growth);

}  // namespace edfm::mesh
