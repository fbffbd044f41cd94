#pragma once

// Closed-form intersection of an axis-aligned box with the half-space
// n.x <= d, by inclusion-exclusion over the box corners. Independent of the
// polygon/polyhedron clipping used in the library. Requires every n_i != 0.

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace oracle {

struct BoxCut
{
  double volume_below = 0.0;
  double volume_above = 0.0;
  Eigen::Vector3d centroid_below = Eigen::Vector3d::Zero();
  Eigen::Vector3d centroid_above = Eigen::Vector3d::Zero();
  double section_area = 0.0;
  Eigen::Vector3d section_centroid = Eigen::Vector3d::Zero();
};

inline BoxCut cut_box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, Eigen::Vector3d n, double d)
{
  const Eigen::Vector3d a = hi - lo;
  d -= n.dot(lo);  // box moved to [0, a]
  std::array<bool, 3> flipped{};
  for (int k = 0; k < 3; ++k)
    if (n[k] < 0.0) {
      flipped[static_cast<std::size_t>(k)] = true;
      d -= n[k] * a[k];
      n[k] = -n[k];
    }
  const double P = n.prod();
  const double nn = n.norm();
  double V = 0.0;
  double S = 0.0;
  Eigen::Vector3d cube_sum = Eigen::Vector3d::Zero();  // sum s r^3 v
  Eigen::Vector3d sq_sum = Eigen::Vector3d::Zero();    // sum s r^2 v
  double quart = 0.0;
  for (int c = 0; c < 8; ++c) {
    Eigen::Vector3d v;
    int upper = 0;
    for (int k = 0; k < 3; ++k) {
      const bool up = (c >> k) & 1;
      v[k] = up ? a[k] : 0.0;
      upper += up;
    }
    const double s = (upper % 2) ? -1.0 : 1.0;
    const double r = std::max(0.0, d - n.dot(v));
    V += s * r * r * r;
    S += s * r * r;
    cube_sum += s * r * r * r * v;
    sq_sum += s * r * r * v;
    quart += s * r * r * r * r;
  }
  V /= 6.0 * P;
  BoxCut out;
  out.volume_below = V;
  out.volume_above = a.prod() - V;
  out.section_area = nn * S / (2.0 * P);
  Eigen::Vector3d moment, section_moment;
  for (int k = 0; k < 3; ++k) {
    moment[k] = quart / (24.0 * P * n[k]) + cube_sum[k] / (6.0 * P);
    section_moment[k] = nn * (V / n[k] + sq_sum[k] / (2.0 * P));
  }
  const Eigen::Vector3d total_moment = a.prod() * 0.5 * a;
  for (int k = 0; k < 3; ++k)
    if (flipped[static_cast<std::size_t>(k)]) {
      moment[k] = V * a[k] - moment[k];
      section_moment[k] = out.section_area * a[k] - section_moment[k];
    }
  out.centroid_below = moment / V + lo;
  out.centroid_above = (total_moment - moment) / out.volume_above + lo;
  out.section_centroid = section_moment / out.section_area + lo;
  return out;
}

}  // namespace oracle
