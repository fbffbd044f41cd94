#include "edfm/mesh/embedding.hpp"

#include "edfm/errors.hpp"
#include "edfm/io/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace edfm::mesh {

namespace {

/// Shifts the plane along its normal until no grid node of the candidate
/// cells lies within `eps` of it.
Vec3 nudge_plane(const StructuredGrid& grid, const FractureSurface& f, const std::array<std::array<int, 2>, 3>& range,
                 double eps)
{
  Vec3 p = f.center;
  for (int attempt = 0; attempt < 16; ++attempt) {
    double closest = std::numeric_limits<double>::max();
    for (int k = range[2][0]; k <= range[2][1] + 1; ++k)
      for (int j = range[1][0]; j <= range[1][1] + 1; ++j)
        for (int i = range[0][0]; i <= range[0][1] + 1; ++i) {
          const Vec3 x(grid.coords(0)[static_cast<std::size_t>(i)], grid.coords(1)[static_cast<std::size_t>(j)],
                       grid.coords(2)[static_cast<std::size_t>(k)]);
          closest = std::min(closest, std::abs(f.normal.dot(x - p)));
        }
    if (closest >= eps) return p;
    p += 2.0 * eps * f.normal;
  }
  return p;
}

}  // namespace

double compute_dbar(const FractureCut& cut)
{
  const double v0 = cut.volume1 + cut.volume2;
  return cut.volume1 / v0 * (cut.centroid1 - cut.centroid_frac).norm() +
         cut.volume2 / v0 * (cut.centroid2 - cut.centroid_frac).norm();
}

Vec3 ramp_gradient(const ElementBasis& basis, const FractureCut& cut, const std::array<Vec3, 8>& nodes)
{
  return ramp_gradient(basis, classify_nodes(nodes, cut.normal, cut.plane_point));
}

std::vector<FractureCut> embed_fracture(const StructuredGrid& grid, const FractureSurface& f)
{
  std::vector<FractureCut> cuts;

  // bounding box of the rectangle
  Vec3 bb_lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 bb_hi = -bb_lo;
  for (double a : {-0.5, 0.5})
    for (double b : {-0.5, 0.5}) {
      const Vec3 corner = f.center + a * f.length * f.tangent1 + b * f.height * f.tangent2;
      bb_lo = bb_lo.cwiseMin(corner);
      bb_hi = bb_hi.cwiseMax(corner);
    }
  const Vec3 dom_lo = grid.lo();
  const Vec3 dom_hi = grid.hi();
  for (int a = 0; a < 3; ++a)
    if (bb_hi[a] < dom_lo[a] || bb_lo[a] > dom_hi[a]) return cuts;

  std::array<std::array<int, 2>, 3> range{};
  for (int a = 0; a < 3; ++a)
    range[static_cast<std::size_t>(a)] = grid.cell_range(a, std::max(bb_lo[a], dom_lo[a]), std::min(bb_hi[a], dom_hi[a]));

  const double h = grid.min_spacing();
  const double tol = 1e-9 * h;
  const Vec3 p = nudge_plane(grid, f, range, tol);
  const double offset = f.normal.dot(p);

  // in-plane rectangle as four half-spaces
  const std::array<HalfSpace, 4> rect = {
      HalfSpace{f.tangent1, f.tangent1.dot(f.center) + 0.5 * f.length},
      HalfSpace{-f.tangent1, -f.tangent1.dot(f.center) + 0.5 * f.length},
      HalfSpace{f.tangent2, f.tangent2.dot(f.center) + 0.5 * f.height},
      HalfSpace{-f.tangent2, -f.tangent2.dot(f.center) + 0.5 * f.height}};

  for (int k = range[2][0]; k <= range[2][1]; ++k)
    for (int j = range[1][0]; j <= range[1][1]; ++j)
      for (int i = range[0][0]; i <= range[0][1]; ++i) {
        const int cell = grid.cell_index(i, j, k);
        const Polyhedron box = grid.cell_polyhedron(cell);

        Polygon section;
        const Polyhedron below = clip(box, HalfSpace{f.normal, offset}, tol, &section);
        if (section.size() < 3) continue;
        Polygon poly = section;
        for (const auto& hs : rect) {
          poly = clip(poly, hs, tol);
          if (poly.size() < 3) break;
        }
        if (poly.size() < 3) continue;
        const double a = area(poly);
        if (a <= 1e-12 * h * h) continue;

        const Polyhedron above = clip(box, HalfSpace{-f.normal, -offset}, tol);
        FractureCut cut;
        cut.cell = cell;
        cut.fracture = f.id;
        cut.polygon = std::move(poly);
        cut.area = a;
        cut.cell_volume = grid.cell_volume(cell);
        cut.volume1 = volume(below);
        cut.volume2 = volume(above);
        // coplanar with a face: only a sliver on one side, treated as tangential contact
        if (std::min(cut.volume1, cut.volume2) <= 1e-8 * cut.cell_volume) continue;
        cut.centroid1 = centroid(below);
        cut.centroid2 = centroid(above);
        cut.centroid_frac = centroid(cut.polygon);
        cut.normal = f.normal;
        cut.plane_point = p;
        cut.dbar = compute_dbar(cut);
        const auto nodes = grid.cell_node_coords(cell);
        cut.ramp_gradient = ramp_gradient(ElementBasis::compute(nodes), cut, nodes);
        cuts.push_back(std::move(cut));
      }
  std::sort(cuts.begin(), cuts.end(), [](const FractureCut& a, const FractureCut& b) { return a.cell < b.cell; });
  return cuts;
}

void write_cuts_csv(const std::vector<FractureCut>& cuts, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "cell_id,frac_id,A,V1,V2,dbar,nx,ny,nz\n";
  for (const auto& c : cuts)
    out << c.cell << ',' << c.fracture << ',' << io::fmt_real(c.area) << ',' << io::fmt_real(c.volume1) << ','
        << io::fmt_real(c.volume2) << ',' << io::fmt_real(c.dbar) << ',' << io::fmt_real(c.normal.x()) << ','
        << io::fmt_real(c.normal.y()) << ',' << io::fmt_real(c.normal.z()) << '\n';
}

}  // namespace edfm::mesh
