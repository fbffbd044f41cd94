#pragma once

#include "edfm/mesh/geometry.hpp"

#include <Eigen/Core>

#include <array>

namespace edfm::mesh {

inline constexpr int kNodesPerHex = 8;
inline constexpr int kGaussPerHex = 8;

using ShapeValues = Eigen::Matrix<double, 8, 1>;
using ShapeGradients = Eigen::Matrix<double, 8, 3>;

/// Trilinear hexahedron evaluated at the 2x2x2 Gauss points.
struct ElementBasis
{
  std::array<ShapeValues, kGaussPerHex> N;
  std::array<ShapeGradients, kGaussPerHex> dN;  // physical gradients
  std::array<double, kGaussPerHex> jxw;          // weight * det J
  std::array<Vec3, kGaussPerHex> points;
  double volume = 0.0;

  static ElementBasis compute(const std::array<Vec3, 8>& nodes);
};

/// Side of each element node w.r.t. an oriented plane: 1 where normal.(x - p) > 0.
using NodeSides = std::array<int, 8>;

NodeSides classify_nodes(const std::array<Vec3, 8>& nodes, const Vec3& normal, const Vec3& point);

/// Gradient of the ramp f = sum of N_a over nodes with side 1, at each Gauss point.
std::array<Vec3, kGaussPerHex> ramp_gradients(const ElementBasis& basis, const NodeSides& sides);

/// Volume average of the ramp gradient. Throws GeometryError when all nodes
/// lie on one side.
Vec3 ramp_gradient(const ElementBasis& basis, const NodeSides& sides);

}  // namespace edfm::mesh
