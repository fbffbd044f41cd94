#include "edfm/mesh/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edfm::mesh {

Polyhedron make_box(const Vec3& lo, const Vec3& hi)
{
  const Vec3 v[8] = {{lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
                     {lo.x(), hi.y(), lo.z()}, {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
                     {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()}};
  Polyhedron box;
  box.faces = {{v[0], v[3], v[2], v[1]}, {v[4], v[5], v[6], v[7]}, {v[0], v[1], v[5], v[4]},
               {v[3], v[7], v[6], v[2]}, {v[0], v[4], v[7], v[3]}, {v[1], v[2], v[6], v[5]}};
  return box;
}

Polygon clip(const Polygon& polygon, const HalfSpace& h, double tol)
{
  Polygon out;
  const std::size_t n = polygon.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = polygon[i];
    const Vec3& b = polygon[(i + 1) % n];
    const double da = h.signed_distance(a);
    const double db = h.signed_distance(b);
    const bool a_in = da <= tol;
    if (a_in) out.push_back(a);
    if ((da < -tol && db > tol) || (da > tol && db < -tol)) {
      const double s = da / (da - db);
      out.push_back(a + s * (b - a));
    }
  }
  // drop consecutive duplicates
  Polygon clean;
  clean.reserve(out.size());
  for (const auto& p : out)
    if (clean.empty() || (p - clean.back()).norm() > tol) clean.push_back(p);
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= tol) clean.pop_back();
  return clean;
}

Polygon order_coplanar(std::vector<Vec3> points, const Vec3& normal, double tol)
{
  Polygon unique;
  for (const auto& p : points) {
    const bool dup = std::any_of(unique.begin(), unique.end(),
                                 [&](const Vec3& q) { return (p - q).norm() <= tol; });
    if (!dup) unique.push_back(p);
  }
  if (unique.size() < 3) return unique;

  Vec3 c = Vec3::Zero();
  for (const auto& p : unique) c += p;
  c /= static_cast<double>(unique.size());

  const Vec3 n = normal.normalized();
  Vec3 e1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
  const Vec3 e2 = n.cross(e1);
  std::vector<std::pair<double, Vec3>> keyed;
  keyed.reserve(unique.size());
  for (const auto& p : unique) keyed.emplace_back(std::atan2((p - c).dot(e2), (p - c).dot(e1)), p);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Polygon ordered;
  ordered.reserve(keyed.size());
  for (auto& [angle, p] : keyed) ordered.push_back(p);
  return ordered;
}

Polyhedron clip(const Polyhedron& poly, const HalfSpace& h, double tol, Polygon* cap)
{
  Polyhedron out;
  std::vector<Vec3> on_plane;
  for (const auto& face : poly.faces) {
    Polygon f = clip(face, h, tol);
    for (const auto& p : f)
      if (std::abs(h.signed_distance(p)) <= tol) on_plane.push_back(p);
    if (f.size() >= 3) out.faces.push_back(std::move(f));
  }
  Polygon c = order_coplanar(std::move(on_plane), h.normal, tol);
  if (c.size() >= 3) {
    // skip the cap when an existing face already lies in the plane
    const bool duplicate = std::any_of(out.faces.begin(), out.faces.end(), [&](const Polygon& f) {
      return std::all_of(f.begin(), f.end(),
                         [&](const Vec3& p) { return std::abs(h.signed_distance(p)) <= tol; });
    });
    if (!duplicate) out.faces.push_back(c);
  }
  if (cap) *cap = c.size() >= 3 ? c : Polygon{};
  return out;
}

double area(const Polygon& polygon)
{
  if (polygon.size() < 3) return 0.0;
  Vec3 s = Vec3::Zero();
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i)
    s += (polygon[i] - polygon[0]).cross(polygon[i + 1] - polygon[0]);
  return 0.5 * s.norm();
}

Vec3 centroid(const Polygon& polygon)
{
  if (polygon.empty()) return Vec3::Zero();
  if (polygon.size() < 3) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : polygon) c += p;
    return c / static_cast<double>(polygon.size());
  }
  double total = 0.0;
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    const double a = 0.5 * (polygon[i] - polygon[0]).cross(polygon[i + 1] - polygon[0]).norm();
    total += a;
    c += a * (polygon[0] + polygon[i] + polygon[i + 1]) / 3.0;
  }
  return total > 0.0 ? Vec3(c / total) : polygon[0];
}

namespace {

Vec3 vertex_mean(const Polyhedron& poly)
{
  Vec3 r = Vec3::Zero();
  std::size_t n = 0;
  for (const auto& f : poly.faces)
    for (const auto& p : f) {
      r += p;
      ++n;
    }
  return n ? Vec3(r / static_cast<double>(n)) : r;
}

template <typename Visit>
void for_each_tet(const Polyhedron& poly, Visit&& visit)
{
  const Vec3 r = vertex_mean(poly);
  for (const auto& f : poly.faces)
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      const double v = std::abs((f[0] - r).cross(f[i] - r).dot(f[i + 1] - r)) / 6.0;
      visit(v, (r + f[0] + f[i] + f[i + 1]) / 4.0);
    }
}

}  // namespace

double volume(const Polyhedron& poly)
{
  double v = 0.0;
  for_each_tet(poly, [&](double tv, const Vec3&) { v += tv; });
  return v;
}

Vec3 centroid(const Polyhedron& poly)
{
  double v = 0.0;
  Vec3 c = Vec3::Zero();
  for_each_tet(poly, [&](double tv, const Vec3& tc) {
    v += tv;
    c += tv * tc;
  });
  return v > 0.0 ? Vec3(c / v) : vertex_mean(poly);
}

double distance_to_line(const Vec3& x, const Vec3& p, const Vec3& d)
{
  const Vec3 r = x - p;
  return (r - r.dot(d) * d).norm();
}

}  // namespace edfm::mesh
