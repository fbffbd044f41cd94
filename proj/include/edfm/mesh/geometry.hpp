#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace edfm::mesh {

using Vec3 = Eigen::Vector3d;
using Polygon = std::vector<Vec3>;

/// Convex polyhedron stored as a list of planar convex faces.
struct Polyhedron
{
  std::vector<Polygon> faces;
};

/// Half-space { x : normal . x <= offset }.
struct HalfSpace
{
  Vec3 normal;
  double offset;

  [[nodiscard]] double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
};

Polyhedron make_box(const Vec3& lo, const Vec3& hi);

/// Sutherland-Hodgman clip of a convex polygon; vertices within tol of the
/// plane count as inside.
Polygon clip(const Polygon& polygon, const HalfSpace& h, double tol);

/// Clip a convex polyhedron. The cap face produced on the plane is appended
/// to the result and also returned through `cap` when non-null.
Polyhedron clip(const Polyhedron& poly, const HalfSpace& h, double tol, Polygon* cap = nullptr);

double area(const Polygon& polygon);
Vec3 centroid(const Polygon& polygon);
double volume(const Polyhedron& poly);
Vec3 centroid(const Polyhedron& poly);

/// Orders coplanar points counter-clockwise about `normal` and merges
/// duplicates closer than tol.
Polygon order_coplanar(std::vector<Vec3> points, const Vec3& normal, double tol);

/// Distance from x to the infinite line through p with unit direction d.
double distance_to_line(const Vec3& x, const Vec3& p, const Vec3& d);

}  // namespace edfm::mesh
