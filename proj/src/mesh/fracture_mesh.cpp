#include "edfm/mesh/fracture_mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>

namespace edfm::mesh {

std::vector<int> FractureMesh::cvs_in_cell(int cell) const
{
  std::vector<int> out;
  for (const auto& ids : by_fracture) {
    auto it = std::lower_bound(ids.begin(), ids.end(), cell,
                               [&](int cv, int c) { return cvs[static_cast<std::size_t>(cv)].cell < c; });
    if (it != ids.end() && cvs[static_cast<std::size_t>(*it)].cell == cell) out.push_back(*it);
  }
  return out;
}

namespace {

/// Vertices of `poly` lying on the plane coord[axis] == value.
std::vector<Vec3> vertices_on(const Polygon& poly, int axis, double value, double tol)
{
  std::vector<Vec3> pts;
  for (const auto& p : poly)
    if (std::abs(p[axis] - value) <= tol) pts.push_back(p);
  return pts;
}

std::pair<Vec3, Vec3> farthest_pair(const std::vector<Vec3>& pts)
{
  std::pair<Vec3, Vec3> best{pts.front(), pts.front()};
  double d = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).norm() > d) {
        d = (pts[i] - pts[j]).norm();
        best = {pts[i], pts[j]};
      }
  return best;
}

/// Chord of a convex polygon along a plane, as an interval of the line parameter.
bool chord(const Polygon& poly, const HalfSpace& plane, const Vec3& origin, const Vec3& dir, double tol,
           double& t0, double& t1)
{
  std::vector<Vec3> pts;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % n];
    const double da = plane.signed_distance(a);
    const double db = plane.signed_distance(b);
    if (std::abs(da) <= tol) pts.push_back(a);
    if ((da < -tol && db > tol) || (da > tol && db < -tol)) pts.push_back(a + da / (da - db) * (b - a));
  }
  if (pts.size() < 2) return false;
  t0 = std::numeric_limits<double>::max();
  t1 = -t0;
  for (const auto& p : pts) {
    const double t = (p - origin).dot(dir);
    t0 = std::min(t0, t);
    t1 = std::max(t1, t);
  }
  return t1 - t0 > tol;
}

SubSegment make_part(const Polygon& part, const Vec3& origin, const Vec3& dir)
{
  SubSegment s;
  if (part.size() < 3) return s;
  s.area = area(part);
  s.centroid = centroid(part);
  s.distance = distance_to_line(s.centroid, origin, dir);
  return s;
}

}  // namespace

FractureMesh build_fracture_mesh(const StructuredGrid& grid, std::vector<std::vector<FractureCut>> cuts,
                                 const std::vector<FractureSurface>& fractures)
{
  FractureMesh fm;
  const double tol = 1e-9 * grid.min_spacing();
  fm.by_fracture.resize(fractures.size());
  for (std::size_t fi = 0; fi < cuts.size() && fi < fractures.size(); ++fi) {
    const auto& f = fractures[fi];
    for (auto& cut : cuts[fi]) {
      FractureCV cv;
      cv.fracture = static_cast<int>(fi);
      cv.cell = cut.cell;
      cv.cut = static_cast<int>(fm.cuts.size());
      cv.area = cut.area;
      cv.centroid = cut.centroid_frac;
      cv.arc = arc_coordinate(f, cut.centroid_frac);
      double lo = std::numeric_limits<double>::max();
      double hi = -lo;
      for (const auto& p : cut.polygon) {
        lo = std::min(lo, arc_coordinate(f, p));
        hi = std::max(hi, arc_coordinate(f, p));
      }
      cv.arc_extent = hi - lo;
      fm.by_fracture[fi].push_back(static_cast<int>(fm.cvs.size()));
      fm.cvs.push_back(cv);
      fm.cuts.push_back(std::move(cut));
    }
  }

  // along-fracture adjacency through shared cell faces
  for (std::size_t fi = 0; fi < fm.by_fracture.size(); ++fi) {
    std::map<int, int> cell_to_cv;
    for (int id : fm.by_fracture[fi]) cell_to_cv[fm.cvs[static_cast<std::size_t>(id)].cell] = id;
    for (int id : fm.by_fracture[fi]) {
      const auto& cv = fm.cvs[static_cast<std::size_t>(id)];
      for (Side side : {Side::xmax, Side::ymax, Side::zmax}) {
        const auto nb = grid.neighbor(cv.cell, side);
        if (!nb) continue;
        const auto it = cell_to_cv.find(*nb);
        if (it == cell_to_cv.end()) continue;
        const int axis = static_cast<int>(side) / 2;
        const double plane = grid.cell_hi(cv.cell)[axis];
        const auto pa = vertices_on(fm.cuts[static_cast<std::size_t>(id)].polygon, axis, plane, tol * 10);
        const auto pb = vertices_on(fm.cuts[static_cast<std::size_t>(it->second)].polygon, axis, plane, tol * 10);
        if (pa.size() < 2 || pb.size() < 2) continue;
        // overlap of the two segments along their common direction
        auto [a0, a1] = farthest_pair(pa);
        auto [b0, b1] = farthest_pair(pb);
        const Vec3 dir = (a1 - a0).normalized();
        double s0 = 0.0, s1 = (a1 - a0).norm();
        double t0 = (b0 - a0).dot(dir), t1 = (b1 - a0).dot(dir);
        if (t0 > t1) std::swap(t0, t1);
        const double lo = std::max(s0, t0);
        const double hi = std::min(s1, t1);
        if (hi - lo <= tol * 10) continue;
        CVAdjacency adj;
        adj.cv_a = std::min(id, it->second);
        adj.cv_b = std::max(id, it->second);
        adj.edge_length = hi - lo;
        adj.edge_midpoint = a0 + 0.5 * (lo + hi) * dir;
        adj.edge_direction = dir;
        fm.adjacency.push_back(adj);
      }
    }
  }
  std::sort(fm.adjacency.begin(), fm.adjacency.end(), [](const CVAdjacency& a, const CVAdjacency& b) {
    return a.cv_a != b.cv_a ? a.cv_a < b.cv_a : a.cv_b < b.cv_b;
  });

  // intersections between CVs of different fractures sharing a cell
  std::map<int, std::vector<int>> cell_cvs;
  for (std::size_t i = 0; i < fm.cvs.size(); ++i) cell_cvs[fm.cvs[i].cell].push_back(static_cast<int>(i));
  for (const auto& [cell, ids] : cell_cvs) {
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const auto& c1 = fm.cuts[static_cast<std::size_t>(ids[a])];
        const auto& c2 = fm.cuts[static_cast<std::size_t>(ids[b])];
        Vec3 dir = c1.normal.cross(c2.normal);
        if (dir.norm() < 1e-8) continue;  // parallel planes
        dir.normalize();
        // a point on both planes
        const double d1 = c1.normal.dot(c1.plane_point);
        const double d2 = c2.normal.dot(c2.plane_point);
        Eigen::Matrix3d M;
        M.row(0) = c1.normal.transpose();
        M.row(1) = c2.normal.transpose();
        M.row(2) = dir.transpose();
        const Vec3 origin = M.partialPivLu().solve(Vec3(d1, d2, dir.dot(c1.centroid_frac)));

        const HalfSpace plane1{c1.normal, d1};
        const HalfSpace plane2{c2.normal, d2};
        double s0, s1, t0, t1;
        if (!chord(c1.polygon, plane2, origin, dir, tol, s0, s1)) continue;
        if (!chord(c2.polygon, plane1, origin, dir, tol, t0, t1)) continue;
        const double lo = std::max(s0, t0);
        const double hi = std::min(s1, t1);
        if (hi - lo <= tol * 10) continue;

        IntersectionRecord rec;
        rec.cv1 = ids[a];
        rec.cv2 = ids[b];
        rec.cell = cell;
        rec.p0 = origin + lo * dir;
        rec.p1 = origin + hi * dir;
        rec.length = hi - lo;
        rec.parts1 = {make_part(clip(c1.polygon, plane2, tol), origin, dir),
                      make_part(clip(c1.polygon, HalfSpace{-c2.normal, -d2}, tol), origin, dir)};
        rec.parts2 = {make_part(clip(c2.polygon, plane1, tol), origin, dir),
                      make_part(clip(c2.polygon, HalfSpace{-c1.normal, -d1}, tol), origin, dir)};
        fm.intersections.push_back(rec);
      }
  }
  return fm;
}

FractureMesh embed_all(const StructuredGrid& grid, const std::vector<FractureSurface>& fractures)
{
  std::vector<std::vector<FractureCut>> cuts;
  cuts.reserve(fractures.size());
  for (std::size_t i = 0; i < fractures.size(); ++i) {
    auto c = embed_fracture(grid, fractures[i]);
    cuts.push_back(std::move(c));
  }
  return build_fracture_mesh(grid, std::move(cuts), fractures);
}

}  // namespace edfm::mesh
