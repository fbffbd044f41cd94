#include "edfm/validation/validation.hpp"

#include "edfm/errors.hpp"
#include "edfm/io/format.hpp"
#include "edfm/units.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace edfm::validation {

namespace {

using linalg::Vector;
using mesh::Vec3;

constexpr double kDeg = std::numbers::pi / 180.0;

double crack_shape(double x, double l, const char* what)
{
  if (!(l > 0.0)) throw ConfigError(std::string(what) + ": half-length must be positive");
  if (x < 0.0 || x > 2.0 * l)
    throw DomainError(std::string(what) + ": x = " + std::to_string(x) + " outside [0, 2l]");
  const double s = l * l - (x - l) * (x - l);
  return std::sqrt(std::max(0.0, s));
}

/// Linear interpolation on a profile sorted by x; constant beyond the ends.
double interpolate(const std::vector<ProfileSample>& p, double x)
{
  if (x <= p.front().x) return p.front().value;
  if (x >= p.back().x) return p.back().value;
  auto it = std::upper_bound(p.begin(), p.end(), x, [](double v, const ProfileSample& s) { return v < s.x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (x - a.x) / (b.x - a.x);
  return a.value + t * (b.value - a.value);
}

void write_profile(const std::filesystem::path& path, const std::vector<ProfileSample>& p,
                   const std::function<double(double)>& ref)
{
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "x,width,value,reference\n";
  for (const auto& s : p)
    out << io::fmt_real(s.x) << ',' << io::fmt_real(s.width) << ',' << io::fmt_real(s.value) << ','
        << io::fmt_real(ref ? ref(s.x) : 0.0) << '\n';
}

/// Axis whose fine zone is [a, b] with one node at `anchor`.
std::vector<double> anchored_axis(double lo, double hi, double a, double b, double anchor, double h,
                                  double growth)
{
  const double fine_lo = anchor - std::ceil((anchor - a) / h - 1e-9) * h;
  return mesh::graded_axis(lo, hi, fine_lo, std::max(b, fine_lo + h), h, growth);
}

struct MechLevel
{
  std::vector<ProfileSample> profile;
  int iterations = 0;
  int cells = 0;
};

MechLevel solve_level(const MechCaseConfig& cfg, double h, double angle_deg)
{
  const double half = 0.5 * cfg.fracture_length;
  const double D = 0.5 * cfg.domain;
  double strike = 0.0;
  mechanics::Voigt stress = mechanics::Voigt::Zero();

  std::vector<double> xs;
  std::vector<double> ys;
  if (cfg.conforming) {
    // fracture on the x axis through cell centres, tips on nodes; the load rotates
    xs = anchored_axis(-D, D, -half - cfg.margin, half + cfg.margin, -half, h, cfg.growth);
    ys = anchored_axis(-D, D, -cfg.margin, cfg.margin, -0.5 * h, h, cfg.growth);
    if (cfg.kind == MechCase::shear) {
      const double a = angle_deg * kDeg;
      const Vec3 d(std::cos(a), std::sin(a), 0.0);
      const Eigen::Matrix3d S = -cfg.load * d * d.transpose();
      stress = mechanics::to_voigt(S);
    }
  } else {
    // rotated fracture on a grid whose nodes avoid its centre; load along x
    strike = angle_deg;
    const double ex = half * std::abs(std::cos(strike * kDeg)) + cfg.margin;
    const double ey = half * std::abs(std::sin(strike * kDeg)) + cfg.margin;
    xs = anchored_axis(-D, D, -ex, ex, -0.37 * h, h, cfg.growth);
    ys = anchored_axis(-D, D, -ey, ey, -0.29 * h, h, cfg.growth);
    if (cfg.kind == MechCase::shear) {
      stress[0] = -cfg.load;
    } else {
      const double a = strike * kDeg;
      const Vec3 n(-std::sin(a), std::cos(a), 0.0);
      stress = mechanics::to_voigt(cfg.load * n * n.transpose());
    }
  }
  if (cfg.conforming && cfg.kind == MechCase::opening) stress[1] = cfg.load;

  const mesh::StructuredGrid grid(xs, ys, {0.0, cfg.thickness});
  const auto frac = mesh::make_fracture(0, Vec3(0.0, 0.0, 0.5 * cfg.thickness), cfg.fracture_length,
                                        cfg.thickness + 2.0, strike, 90.0);
  const auto fm = mesh::embed_all(grid, std::vector<mesh::FractureSurface>{frac});
  const auto model = mechanics::build_mech_model(grid, fm, cfg.props);

  mechanics::BoundaryConditionsMech bc;
  bc.far_field = stress;
  for (auto side : {mesh::Side::xmin, mesh::Side::xmax, mesh::Side::ymin, mesh::Side::ymax}) {
    mechanics::FaceBC f;
    f.side = side;
    f.far_field = true;
    bc.faces.push_back(f);
  }
  for (auto side : {mesh::Side::zmin, mesh::Side::zmax}) {
    mechanics::FaceBC f;
    f.side = side;
    f.displacement[2] = 0.0;
    bc.faces.push_back(f);
  }
  // rigid-body modes: translation at one corner, rotation at the next
  for (int k = 0; k <= grid.nz(); ++k) {
    bc.pins.push_back({grid.node_index(0, 0, k), 0, 0.0});
    bc.pins.push_back({grid.node_index(0, 0, k), 1, 0.0});
    bc.pins.push_back({grid.node_index(grid.nx(), 0, k), 1, 0.0});
  }

  const std::vector<double> pm(static_cast<std::size_t>(grid.n_cells()), 0.0);
  const std::vector<double> pf(static_cast<std::size_t>(fm.n_cvs()), 0.0);
  const auto sol = mechanics::solve_mechanics(model, bc, {pm, pf}, mechanics::initial_contact_state(model));
  if (sol.relaxed > 0) spdlog::warn("{} element contact states were relaxed", sol.relaxed);

  MechLevel out;
  out.iterations = sol.iterations;
  out.cells = grid.n_cells();
  for (const auto& pt : mechanics::fracture_profile(model, sol.state, 0)) {
    const double width = fm.cvs[static_cast<std::size_t>(pt.cv)].arc_extent;
    out.profile.push_back(ProfileSample{pt.arc, width, cfg.kind == MechCase::shear ? pt.slip : pt.opening});
  }
  return out;
}

}  // namespace

double analytical_slip(double x, const SlipReference& r)
{
  const double a = r.angle_deg * kDeg;
  const double shape = crack_shape(x, r.half_length, "analytical_slip");
  return 4.0 * (1.0 - r.poisson * r.poisson) / r.young * r.load * std::sin(a) *
         (std::cos(a) - r.friction * std::sin(a)) * shape;
}

double analytical_aperture(double x, const ApertureReference& r)
{
  const double shape = crack_shape(x, r.half_length, "analytical_aperture");
  return (1.0 - r.poisson) / r.shear_modulus * r.load * shape;
}

double l2_error(const std::vector<ProfileSample>& profile, const std::function<double(double)>& reference)
{
  if (profile.empty()) throw DomainError("l2_error: empty profile");
  double wsum = 0.0;
  double refmax = 0.0;
  for (const auto& s : profile) {
    wsum += s.width;
    refmax = std::max(refmax, std::abs(reference(s.x)));
  }
  if (!(wsum > 0.0)) throw DomainError("l2_error: profile has zero total width");
  if (!(refmax > 0.0)) throw DomainError("l2_error: reference vanishes on the profile");
  double acc = 0.0;
  for (const auto& s : profile) {
    const double d = s.value - reference(s.x);
    acc += s.width / wsum * d * d;
  }
  return std::sqrt(acc) / refmax;
}

double fit_convergence(const std::vector<ConvergencePoint>& points)
{
  if (points.size() < 3) throw DomainError("fit_convergence: need at least 3 refinement levels");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    if (!(p.error > 0.0) || !(p.h > 0.0)) throw DomainError("fit_convergence: errors and sizes must be positive");
    const double x = std::log(p.h);
    const double y = std::log(p.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw DomainError("fit_convergence: all sizes are equal");
  return (n * sxy - sx * sy) / den;
}

mechanics::MechProps reference_mech_props()
{
  mechanics::MechProps p;
  p.young = 1e3 * units::megapascal;
  p.poisson = 0.25;
  p.friction = 0.6;
  p.dilation = 0.0;
  p.cohesion = 0.0;
  p.hardening = 0.0;
  p.biot = 1.0;
  return p;
}

std::vector<ConvergenceReport> run_mech_case(const MechCaseConfig& cfg)
{
  const double half = 0.5 * cfg.fracture_length;
  std::vector<ConvergenceReport> reports;
  const std::vector<double> angles =
      cfg.kind == MechCase::opening && cfg.conforming ? std::vector<double>{0.0} : cfg.angles_deg;
  for (double angle : angles) {
    ConvergenceReport rep;
    std::ostringstream id;
    id << (cfg.kind == MechCase::shear ? "shear" : "opening") << '_'
       << (cfg.conforming ? "conforming" : "nonconforming");
    if (cfg.kind == MechCase::shear || !cfg.conforming) id << "_a" << angle;
    rep.test = id.str();

    std::function<double(double)> ref;
    if (cfg.kind == MechCase::shear) {
      SlipReference r;
      r.young = cfg.props.young;
      r.poisson = cfg.props.poisson;
      r.friction = cfg.props.friction;
      r.load = cfg.load;
      r.angle_deg = angle;
      r.half_length = half;
      ref = [r](double x) { return analytical_slip(std::clamp(x, 0.0, 2.0 * r.half_length), r); };
    } else {
      ApertureReference r;
      r.shear_modulus = cfg.props.shear_modulus();
      r.poisson = cfg.props.poisson;
      r.load = cfg.load;
      r.half_length = half;
      const double f = cfg.aperture_reference_factor;
      ref = [r, f](double x) { return f * analytical_aperture(std::clamp(x, 0.0, 2.0 * r.half_length), r); };
    }

    std::vector<double> hs;
    if (cfg.conforming)
      for (int n : cfg.n_fracture_cells) hs.push_back(cfg.fracture_length / n);
    else
      hs = cfg.spacings;
    for (double h : hs) {
      const auto level = solve_level(cfg, h, angle);
      ConvergencePoint pt;
      pt.h = h;
      pt.n_fracture_cells = static_cast<int>(level.profile.size());
      pt.error = l2_error(level.profile, ref);
      pt.reference_max = ref(half);
      for (const auto& s : level.profile) pt.computed_max = std::max(pt.computed_max, s.value);
      pt.newton_iterations = level.iterations;
      pt.cells = level.cells;
      spdlog::info("{} h={:.4g}: L2 error {:.4e}, max {:.5g} (reference {:.5g}), {} Newton iterations", rep.test, h,
                   pt.error, pt.computed_max, pt.reference_max, pt.newton_iterations);
      rep.points.push_back(pt);
      if (!cfg.profile_dir.empty()) {
        std::ostringstream name;
        name << rep.test << "_h" << h << ".csv";
        write_profile(cfg.profile_dir / name.str(), level.profile, ref);
      }
    }
    rep.exponent = rep.points.size() >= 3 ? fit_convergence(rep.points) : 0.0;
    reports.push_back(std::move(rep));
  }
  return reports;
}

flow::FlowProps reference_flow_props()
{
  flow::FlowProps p;
  const double k = 10.0 * units::millidarcy;
  p.permeability = Vec3(k, k, k);
  p.porosity = 0.2;
  p.viscosity = 1.0 * units::centipoise;
  p.compressibility = 5e-3 * units::per_megapascal;
  // b = porosity removes the grain term: storage is porosity times compressibility
  p.biot = p.porosity;
  p.density = 1000.0;
  return p;
}

namespace {

struct FlowLevel
{
  mesh::StructuredGrid grid;
  std::vector<mesh::FractureSurface> fractures;
  mesh::FractureMesh fm;
  flow::FlowSystem sys;
};

FlowLevel build_flow_level(const FlowCaseConfig& cfg, double h)
{
  const double D = 0.5 * cfg.domain;
  const int n = static_cast<int>(std::lround(cfg.domain / h));
  if (std::abs(n * h - cfg.domain) > 1e-9 * cfg.domain)
    throw ConfigError("flow case: spacing must divide the domain size");
  auto grid = mesh::StructuredGrid::uniform({n, n, 1}, Vec3(cfg.domain, cfg.domain, cfg.thickness),
                                            Vec3(-D, -D, 0.0));
  std::vector<mesh::FractureSurface> fr{mesh::make_fracture(0, Vec3(0.0, 0.0, 0.5 * cfg.thickness),
                                                            cfg.fracture_length, cfg.thickness + 2.0,
                                                            cfg.fracture_strike_deg, 90.0, cfg.conductivity_mdm)};
  auto fm = mesh::embed_all(grid, fr);
  const double w = D - cfg.well_offset;
  std::vector<flow::WellSpec> wells;
  const std::array<std::pair<std::string, Vec3>, 4> sites{{{"INJ", Vec3(-w, w, 0.0)},
                                                           {"PROD_NE", Vec3(w, w, 0.0)},
                                                           {"PROD_SW", Vec3(-w, -w, 0.0)},
                                                           {"PROD_SE", Vec3(w, -w, 0.0)}}};
  for (const auto& [name, at] : sites) {
    flow::WellConfig wc;
    wc.name = name;
    wc.control = flow::WellControl::bhp;
    wc.value = name == "INJ" ? cfg.injector_bhp : cfg.producer_bhp;
    wc.location = at;
    wells.push_back(flow::resolve_well(wc, grid, fm, cfg.props.permeability));
  }
  auto sys = flow::build_flow_system(grid, fm, fr, cfg.props, std::move(wells));
  return {std::move(grid), std::move(fr), std::move(fm), std::move(sys)};
}

std::vector<ProfileSample> fracture_pressure(const FlowLevel& lv, const Vector& p)
{
  std::vector<ProfileSample> out;
  for (int cv : lv.fm.by_fracture.front()) {
    const auto& rec = lv.fm.cvs[static_cast<std::size_t>(cv)];
    out.push_back(ProfileSample{rec.arc, rec.arc_extent, p[lv.sys.n_matrix + cv]});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  return out;
}

}  // namespace

FlowCaseResult run_flow_case(const FlowCaseConfig& cfg)
{
  cfg.props.validate();
  FlowCaseResult res;
  res.report.test = "flow_steady";
  res.p_min = std::numeric_limits<double>::infinity();
  res.p_max = -std::numeric_limits<double>::infinity();
  auto track = [&](const Vector& p) {
    res.p_min = std::min(res.p_min, p.minCoeff());
    res.p_max = std::max(res.p_max, p.maxCoeff());
  };

  std::vector<ProfileSample> reference;
  {
    const auto lv = build_flow_level(cfg, cfg.reference_spacing);
    const Vector p = flow::solve_steady(lv.sys, cfg.linear);
    track(p);
    reference = fracture_pressure(lv, p);
    spdlog::info("flow reference h={}: {} cells, {} fracture CVs", cfg.reference_spacing, lv.grid.n_cells(),
                 lv.fm.n_cvs());
    if (!cfg.profile_dir.empty())
      write_profile(cfg.profile_dir / ("flow_h" + std::to_string(cfg.reference_spacing) + ".csv"), reference, {});
  }
  const auto ref = [&reference](double x) { return interpolate(reference, x); };

  for (double h : cfg.spacings) {
    const auto lv = build_flow_level(cfg, h);
    const Vector p = flow::solve_steady(lv.sys, cfg.linear);
    track(p);
    const auto prof = fracture_pressure(lv, p);
    ConvergencePoint pt;
    pt.h = h;
    pt.n_fracture_cells = static_cast<int>(prof.size());
    pt.error = l2_error(prof, ref);
    pt.cells = lv.grid.n_cells();
    for (const auto& s : prof) pt.computed_max = std::max(pt.computed_max, s.value);
    for (const auto& s : reference) pt.reference_max = std::max(pt.reference_max, s.value);
    spdlog::info("flow h={}: L2 error {:.4e}", h, pt.error);
    res.report.points.push_back(pt);
    if (!cfg.profile_dir.empty()) {
      std::ostringstream name;
      name << "flow_h" << h << ".csv";
      write_profile(cfg.profile_dir / name.str(), prof, ref);
    }
  }
  res.report.exponent = res.report.points.size() >= 3 ? fit_convergence(res.report.points) : 0.0;

  // transient from the uniform initial state, sampled at the snapshot days
  const auto lv = build_flow_level(cfg, cfg.transient_spacing);
  Vector p = Vector::Constant(lv.sys.size(), cfg.initial_pressure);
  const double dt = cfg.transient_days * units::day / cfg.transient_steps;
  auto mean_fracture = [&](const Vector& v) {
    double s = 0.0;
    for (int i = lv.sys.n_matrix; i < lv.sys.size(); ++i) s += v[i];
    return s / std::max(1, lv.sys.n_fracture);
  };
  res.transient_mean.push_back(mean_fracture(p));
  res.transient_max_rise = -std::numeric_limits<double>::infinity();
  std::size_t next_snap = 0;
  for (int k = 1; k <= cfg.transient_steps; ++k) {
    const Vector next = flow::step_flow(lv.sys, p, dt, cfg.linear);
    track(next);
    for (int i = lv.sys.n_matrix; i < lv.sys.size(); ++i)
      res.transient_max_rise = std::max(res.transient_max_rise, next[i] - p[i]);
    p = next;
    res.transient_mean.push_back(mean_fracture(p));
    const double t_days = k * dt / units::day;
    while (next_snap < cfg.snapshot_days.size() && t_days >= cfg.snapshot_days[next_snap] - 1e-9) {
      res.snapshots.push_back(fracture_pressure(lv, p));
      ++next_snap;
    }
  }
  res.snapshots.push_back(fracture_pressure(lv, flow::solve_steady(lv.sys, cfg.linear)));

  res.snapshot_max_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < res.snapshots.size(); ++s)
    for (std::size_t i = 0; i < res.snapshots[s].size(); ++i)
      res.snapshot_max_rise =
          std::max(res.snapshot_max_rise, res.snapshots[s][i].value - res.snapshots[s - 1][i].value);
  // allow round-off of the linear solves
  res.transient_monotone = res.snapshots.size() >= 2 && res.snapshot_max_rise <= 1e-9 * cfg.initial_pressure;
  if (!cfg.profile_dir.empty()) {
    for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
      const std::string tag = s < cfg.snapshot_days.size() ? "day" + std::to_string(static_cast<int>(cfg.snapshot_days[s]))
                                                           : std::string("steady");
      write_profile(cfg.profile_dir / ("flow_transient_" + tag + ".csv"), res.snapshots[s], {});
    }
  }
  return res;
}

void write_report_csv(const ConvergenceReport& report, const std::filesystem::path& path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# test=" << report.test << " exponent=" << io::fmt_real(report.exponent) << '\n';
  out << "h,n_fracture_cells,l2_error,computed_max,reference_max,newton_iterations,cells\n";
  for (const auto& p : report.points)
    out << io::fmt_real(p.h) << ',' << p.n_fracture_cells << ',' << io::fmt_real(p.error) << ','
        << io::fmt_real(p.computed_max) << ',' << io::fmt_real(p.reference_max) << ',' << p.newton_iterations
        << ',' << p.cells << '\n';
}

}  // namespace edfm::validation
