#include "edfm/mesh/basis.hpp"

#include "edfm/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace edfm::mesh {

namespace {

constexpr std::array<std::array<double, 3>, 8> kNodeSigns = {{{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                                             {-1, -1, 1}, {1, -1, 1}, {1, 1, 1}, {-1, 1, 1}}};

}  // namespace

ElementBasis ElementBasis::compute(const std::array<Vec3, 8>& nodes)
{
  ElementBasis b;
  const double g = 1.0 / std::sqrt(3.0);
  int q = 0;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i, ++q) {
        const Vec3 xi((i ? g : -g), (j ? g : -g), (k ? g : -g));
        ShapeValues N;
        Eigen::Matrix<double, 8, 3> dNdxi;
        for (int a = 0; a < 8; ++a) {
          const auto& s = kNodeSigns[static_cast<std::size_t>(a)];
          const double fx = 1.0 + s[0] * xi.x();
          const double fy = 1.0 + s[1] * xi.y();
          const double fz = 1.0 + s[2] * xi.z();
          N(a) = 0.125 * fx * fy * fz;
          dNdxi(a, 0) = 0.125 * s[0] * fy * fz;
          dNdxi(a, 1) = 0.125 * s[1] * fx * fz;
          dNdxi(a, 2) = 0.125 * s[2] * fx * fy;
        }
        Eigen::Matrix3d J = Eigen::Matrix3d::Zero();  // J_ij = dx_i / dxi_j
        Vec3 x = Vec3::Zero();
        for (int a = 0; a < 8; ++a) {
          J += nodes[static_cast<std::size_t>(a)] * dNdxi.row(a);
          x += N(a) * nodes[static_cast<std::size_t>(a)];
        }
        const double det = J.determinant();
        if (!(det > 0.0)) throw GeometryError("singular or inverted hexahedron (det J <= 0)");
        const std::size_t qs = static_cast<std::size_t>(q);
        b.N[qs] = N;
        b.dN[qs] = dNdxi * J.inverse();
        b.jxw[qs] = det;  // unit Gauss weights
        b.points[qs] = x;
        b.volume += det;
      }
  return b;
}

NodeSides classify_nodes(const std::array<Vec3, 8>& nodes, const Vec3& normal, const Vec3& point)
{
  NodeSides sides{};
  for (std::size_t a = 0; a < 8; ++a) sides[a] = normal.dot(nodes[a] - point) > 0.0 ? 1 : 0;
  return sides;
}

std::array<Vec3, kGaussPerHex> ramp_gradients(const ElementBasis& basis, const NodeSides& sides)
{
  std::array<Vec3, kGaussPerHex> g;
  for (std::size_t q = 0; q < kGaussPerHex; ++q) {
    g[q].setZero();
    for (int a = 0; a < 8; ++a)
      if (sides[static_cast<std::size_t>(a)]) g[q] += basis.dN[q].row(a).transpose();
  }
  return g;
}

Vec3 ramp_gradient(const ElementBasis& basis, const NodeSides& sides)
{
  int count = 0;
  for (int s : sides) count += s;
  if (count == 0 || count == 8) throw GeometryError("degenerate cut: all element nodes on one side of the fracture");
  const auto g = ramp_gradients(basis, sides);
  Vec3 avg = Vec3::Zero();
  for (std::size_t q = 0; q < kGaussPerHex; ++q) avg += basis.jxw[q] * g[q];
  return avg / basis.volume;
}

}  // namespace edfm::mesh
