#include "edfm/mesh/grid.hpp"

#include "edfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace edfm::mesh {

StructuredGrid::StructuredGrid(std::vector<double> x, std::vector<double> y, std::vector<double> z)
    : coords_{std::move(x), std::move(y), std::move(z)}
{
  min_spacing_ = std::numeric_limits<double>::max();
  for (int a = 0; a < 3; ++a) {
    const auto& c = coords_[static_cast<std::size_t>(a)];
    if (c.size() < 2) throw ConfigError("grid needs at least one cell along axis " + std::to_string(a));
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      const double h = c[i + 1] - c[i];
      if (!(h > 0.0)) throw ConfigError("grid coordinates must be strictly increasing along axis " + std::to_string(a));
      min_spacing_ = std::min(min_spacing_, h);
    }
  }

  interior_faces_.reserve(static_cast<std::size_t>(3 * n_cells()));
  for (int k = 0; k < nz(); ++k)
    for (int j = 0; j < ny(); ++j)
      for (int i = 0; i < nx(); ++i) {
        const int c = cell_index(i, j, k);
        const Vec3 s = cell_size(c);
        if (i + 1 < nx()) interior_faces_.push_back({c, cell_index(i + 1, j, k), 0, s.y() * s.z()});
        if (j + 1 < ny()) interior_faces_.push_back({c, cell_index(i, j + 1, k), 1, s.x() * s.z()});
        if (k + 1 < nz()) interior_faces_.push_back({c, cell_index(i, j, k + 1), 2, s.x() * s.y()});
      }
}

StructuredGrid StructuredGrid::uniform(const std::array<int, 3>& cells, const Vec3& extent, const Vec3& origin)
{
  std::array<std::vector<double>, 3> c;
  for (int a = 0; a < 3; ++a) {
    const int n = cells[static_cast<std::size_t>(a)];
    if (n <= 0) throw ConfigError("grid cell count must be positive along axis " + std::to_string(a));
    if (!(extent[a] > 0.0)) throw ConfigError("grid extent must be positive along axis " + std::to_string(a));
    auto& v = c[static_cast<std::size_t>(a)];
    v.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = origin[a] + extent[a] * i / n;
  }
  return StructuredGrid(std::move(c[0]), std::move(c[1]), std::move(c[2]));
}

StructuredGrid build_cartesian_grid(const GridConfig& config)
{
  return StructuredGrid::uniform(config.cells, config.extent, config.origin);
}

std::array<int, 3> StructuredGrid::cell_ijk(int cell) const
{
  const int i = cell % nx();
  const int j = (cell / nx()) % ny();
  const int k = cell / (nx() * ny());
  return {i, j, k};
}

std::array<int, 3> StructuredGrid::node_ijk(int node) const
{
  const int px = nx() + 1;
  const int py = ny() + 1;
  return {node % px, (node / px) % py, node / (px * py)};
}

Vec3 StructuredGrid::node(int n) const
{
  const auto [i, j, k] = node_ijk(n);
  return {coords_[0][static_cast<std::size_t>(i)], coords_[1][static_cast<std::size_t>(j)],
          coords_[2][static_cast<std::size_t>(k)]};
}

std::array<int, 8> StructuredGrid::cell_nodes(int cell) const
{
  const auto [i, j, k] = cell_ijk(cell);
  return {node_index(i, j, k),         node_index(i + 1, j, k),         node_index(i + 1, j + 1, k),
          node_index(i, j + 1, k),     node_index(i, j, k + 1),         node_index(i + 1, j, k + 1),
          node_index(i + 1, j + 1, k + 1), node_index(i, j + 1, k + 1)};
}

std::array<Vec3, 8> StructuredGrid::cell_node_coords(int cell) const
{
  std::array<Vec3, 8> x;
  const auto nodes = cell_nodes(cell);
  for (std::size_t a = 0; a < 8; ++a) x[a] = node(nodes[a]);
  return x;
}

Vec3 StructuredGrid::cell_lo(int cell) const
{
  const auto [i, j, k] = cell_ijk(cell);
  return {coords_[0][static_cast<std::size_t>(i)], coords_[1][static_cast<std::size_t>(j)],
          coords_[2][static_cast<std::size_t>(k)]};
}

Vec3 StructuredGrid::cell_hi(int cell) const
{
  const auto [i, j, k] = cell_ijk(cell);
  return {coords_[0][static_cast<std::size_t>(i) + 1], coords_[1][static_cast<std::size_t>(j) + 1],
          coords_[2][static_cast<std::size_t>(k) + 1]};
}

std::optional<int> StructuredGrid::locate(const Vec3& p) const
{
  std::array<int, 3> ijk{};
  for (int a = 0; a < 3; ++a) {
    const auto& c = coords_[static_cast<std::size_t>(a)];
    if (p[a] < c.front() || p[a] > c.back()) return std::nullopt;
    auto it = std::lower_bound(c.begin(), c.end(), p[a]);
    int idx = static_cast<int>(it - c.begin()) - 1;
    ijk[static_cast<std::size_t>(a)] = std::clamp(idx, 0, static_cast<int>(c.size()) - 2);
  }
  return cell_index(ijk[0], ijk[1], ijk[2]);
}

std::array<int, 2> StructuredGrid::cell_range(int axis, double a, double b) const
{
  const auto& c = coords_[static_cast<std::size_t>(axis)];
  const int n = static_cast<int>(c.size()) - 1;
  int first = static_cast<int>(std::upper_bound(c.begin(), c.end(), a) - c.begin()) - 1;
  int last = static_cast<int>(std::lower_bound(c.begin(), c.end(), b) - c.begin()) - 1;
  return {std::clamp(first, 0, n - 1), std::clamp(last, 0, n - 1)};
}

std::vector<BoundaryFace> StructuredGrid::boundary_faces(Side side) const
{
  std::vector<BoundaryFace> faces;
  const int axis = static_cast<int>(side) / 2;
  const bool upper = static_cast<int>(side) % 2 == 1;
  // local node numbers (VTK hex) of each side
  static constexpr std::array<std::array<int, 4>, 6> local = {{{0, 3, 7, 4}, {1, 2, 6, 5}, {0, 1, 5, 4},
                                                               {3, 2, 6, 7}, {0, 1, 2, 3}, {4, 5, 6, 7}}};
  const std::array<int, 3> n = {nx(), ny(), nz()};
  const int fixed = upper ? n[static_cast<std::size_t>(axis)] - 1 : 0;
  for (int k = 0; k < nz(); ++k)
    for (int j = 0; j < ny(); ++j)
      for (int i = 0; i < nx(); ++i) {
        const std::array<int, 3> ijk = {i, j, k};
        if (ijk[static_cast<std::size_t>(axis)] != fixed) continue;
        const int c = cell_index(i, j, k);
        const auto nodes = cell_nodes(c);
        BoundaryFace f{c, side, {}, 0.0};
        for (std::size_t q = 0; q < 4; ++q)
          f.nodes[q] = nodes[static_cast<std::size_t>(local[static_cast<std::size_t>(side)][q])];
        const Vec3 s = cell_size(c);
        f.area = axis == 0 ? s.y() * s.z() : axis == 1 ? s.x() * s.z() : s.x() * s.y();
        faces.push_back(f);
      }
  return faces;
}

std::optional<int> StructuredGrid::neighbor(int cell, Side side) const
{
  auto [i, j, k] = cell_ijk(cell);
  switch (side) {
    case Side::xmin: --i; break;
    case Side::xmax: ++i; break;
    case Side::ymin: --j; break;
    case Side::ymax: ++j; break;
    case Side::zmin: --k; break;
    case Side::zmax: ++k; break;
  }
  if (i < 0 || j < 0 || k < 0 || i >= nx() || j >= ny() || k >= nz()) return std::nullopt;
  return cell_index(i, j, k);
}

std::vector<double> graded_axis(double lo, double hi, double fine_lo, double fine_hi, double h, double growth)
{
  if (!(h > 0.0) || !(growth >= 1.0) || !(lo <= fine_lo && fine_lo < fine_hi && fine_hi <= hi))
    throw ConfigError("graded_axis: inconsistent parameters");
  std::vector<double> x;
  // fine block, extended so that it ends on a whole number of cells
  const int n_fine = static_cast<int>(std::ceil((fine_hi - fine_lo) / h - 1e-9));
  for (int i = 0; i <= n_fine; ++i) x.push_back(fine_lo + i * h);

  auto grow = [&](double start, double limit, double dir) {
    std::vector<double> out;
    double pos = start;
    double step = h;
    while (dir * (limit - pos) > 1e-12) {
      step *= growth;
      double next = pos + dir * step;
      // absorb a short remainder into the last cell
      if (dir * (limit - next) < 0.5 * step) next = limit;
      out.push_back(next);
      pos = next;
    }
    return out;
  };

  if (x.back() > hi) throw ConfigError("graded_axis: fine region exceeds domain");
  auto right = grow(x.back(), hi, 1.0);
  auto left = grow(x.front(), lo, -1.0);
  std::vector<double> axis(left.rbegin(), left.rend());
  axis.insert(axis.end(), x.begin(), x.end());
  axis.insert(axis.end(), right.begin(), right.end());
  return axis;
}

}  // namespace edfm::mesh
