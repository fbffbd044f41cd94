#include "edfm/validation/demo.hpp"

#include "edfm/errors.hpp"
#include "edfm/io/format.hpp"
#include "edfm/io/runner.hpp"
#include "edfm/io/vtk.hpp"
#include "edfm/units.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <numbers>

namespace edfm::validation {

DemoConfig::DemoConfig()
{
  mech.young = 1e9;
  mech.poisson = 0.25;
  mech.friction = 0.6;
  mech.biot = 1.0;
  // tight matrix and a large storage so that pressure stays near #1 and
  // reaches the parallel fractures by diffusion on the injection time scale
  const double k = 0.5 * units::millidarcy;
  flow.permeability = {k, k, k};
  flow.porosity = 0.2;
  flow.compressibility = 1.5e-7;
  flow.viscosity = 1.0 * units::centipoise;
  flow.biot = mech.biot;
  flow.bulk_modulus = mech.bulk_modulus();
  initial_stress << -30e6, -24e6, -70e6, 0.0, 0.0, 0.0;
  schedule.dt_initial = 0.25 * units::day;
  schedule.dt_max = 2.0 * units::day;
}

std::vector<DemoFracture> DemoConfig::default_layout()
{
  // #1 through the injector; #2/#3 parallel to it at 65 m; #8/#9 parallel to it
  // and centred on the injector, #9 6 m and #8 7 m off #1 on either side; the
  // steep sets #4-#7 towards the corners
  return {{{0.0, 0.0, 0.0}, 120.0, 30.0, 90.0},    {{-32.5, 56.3, 0.0}, 80.0, 30.0, 90.0},
          {{32.5, -56.3, 0.0}, 80.0, 30.0, 90.0},  {{-85.0, 45.0, 0.0}, 60.0, 80.0, 90.0},
          {{85.0, -45.0, 0.0}, 60.0, 80.0, 90.0},  {{-80.0, -55.0, 0.0}, 60.0, 80.0, 80.0},
          {{80.0, 55.0, 0.0}, 60.0, 80.0, 80.0},   {{-3.5, 6.062, 0.0}, 60.0, 30.0, 80.0},
          {{3.0, -5.196, 0.0}, 60.0, 30.0, 80.0}};
}

coupling::CoupledModelInput build_demo_input(const DemoConfig& cfg)
{
  if (cfg.cells_xy < 2 || cfg.cells_z < 1) throw ConfigError("demo: grid too coarse");
  const double D = 0.5 * cfg.domain;
  coupling::CoupledModelInput in{
      mesh::StructuredGrid::uniform({cfg.cells_xy, cfg.cells_xy, cfg.cells_z},
                                    Vec3(cfg.domain, cfg.domain, cfg.thickness), Vec3(-D, -D, 0.0)),
      {}, cfg.mech, cfg.flow, {}, {}, cfg.initial_stress, cfg.initial_pressure};

  for (std::size_t i = 0; i < cfg.fractures.size(); ++i) {
    const auto& f = cfg.fractures[i];
    // cut the full thickness
    const double height = cfg.thickness / std::sin(f.dip_deg * std::numbers::pi / 180.0) + 2.0;
    in.fractures.push_back(mesh::make_fracture(static_cast<int>(i), Vec3(f.center.x(), f.center.y(), 0.5 * cfg.thickness),
                                               f.length, height, f.strike_deg, f.dip_deg, cfg.conductivity_mdm));
  }

  flow::WellConfig inj;
  inj.name = "INJ";
  inj.control = flow::WellControl::rate;
  inj.value = cfg.injection_rate;
  inj.location = cfg.fractures.front().center;
  inj.fractures = {0};
  in.wells.push_back(inj);
  const double w = D - cfg.well_offset;
  const std::array<std::pair<const char*, Vec3>, 4> corners{{{"PROD_NE", Vec3(w, w, 0.0)},
                                                             {"PROD_NW", Vec3(-w, w, 0.0)},
                                                             {"PROD_SW", Vec3(-w, -w, 0.0)},
                                                             {"PROD_SE", Vec3(w, -w, 0.0)}}};
  for (const auto& [name, at] : corners) {
    flow::WellConfig p;
    p.name = name;
    p.control = flow::WellControl::bhp;
    p.value = cfg.producer_bhp;
    p.location = at;
    in.wells.push_back(p);
  }

  // rollers on the bottom, left and front faces, far-field traction opposite
  const std::array<std::pair<mesh::Side, mesh::Side>, 3> walls{{{mesh::Side::xmin, mesh::Side::xmax},
                                                                {mesh::Side::ymin, mesh::Side::ymax},
                                                                {mesh::Side::zmin, mesh::Side::zmax}}};
  for (std::size_t c = 0; c < walls.size(); ++c) {
    mechanics::FaceBC fixed;
    fixed.side = walls[c].first;
    fixed.displacement[c] = 0.0;
    mechanics::FaceBC loaded;
    loaded.side = walls[c].second;
    loaded.far_field = true;
    in.bc.faces.push_back(fixed);
    in.bc.faces.push_back(loaded);
  }
  in.bc.far_field = cfg.initial_stress;
  return in;
}

namespace {

double injector_pressure(const coupling::CoupledModel& model, const coupling::CoupledState& s)
{
  for (const auto& w : model.flow.wells) {
    if (w.control != flow::WellControl::rate) continue;
    double sum = 0.0;
    for (const auto& c : w.completions) sum += s.p[c.cv];
    return w.completions.empty() ? 0.0 : sum / static_cast<double>(w.completions.size());
  }
  return 0.0;
}

}  // namespace

DemoResult run_demo(const DemoConfig& cfg, const coupling::StepObserver& observer)
{
  const auto model = coupling::build_coupled_model(build_demo_input(cfg));
  spdlog::info("demo: {} cells, {} fracture CVs, {} unknowns", model.grid->n_cells(), model.fm->n_cvs(), model.size());
  auto state = coupling::initialize(model, cfg.initial_pressure);

  DemoResult out;
  const std::size_t nf = model.fractures.size();
  out.initial_shear = coupling::mean_shear_traction(model, state.contact);
  out.activation_day.assign(nf, -1.0);
  out.opening_day.assign(nf, -1.0);
  for (std::size_t f = 0; f < nf; ++f)
    spdlog::info("demo: fracture #{} initial mean shear traction {:.3f} MPa", f + 1, out.initial_shear[f] / 1e6);

  auto sch = cfg.schedule;
  sch.end_time = cfg.end_days * units::day;
  std::vector<double> snapshots;
  if (cfg.output_dir)
    for (double d : cfg.snapshot_days)
      if (d > 0.0 && d <= cfg.end_days) snapshots.push_back(d * units::day);
  sch.report_times.insert(sch.report_times.end(), snapshots.begin(), snapshots.end());
  auto track = [&](const coupling::CoupledState& s, const coupling::RunLogEntry& e) {
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& c = e.fractures[f];
      if (out.activation_day[f] < 0.0 && c.slip + c.open > 0) {
        out.activation_day[f] = e.time / units::day;
        spdlog::info("demo: fracture #{} activates at {:.2f} d", f + 1, out.activation_day[f]);
      }
      if (out.opening_day[f] < 0.0 && c.open > 0) {
        out.opening_day[f] = e.time / units::day;
        spdlog::info("demo: fracture #{} opens at {:.2f} d", f + 1, out.opening_day[f]);
      }
    }
    spdlog::debug("demo: t = {:.2f} d, injector {:.3f} MPa, {} Newton iterations", e.time / units::day,
                  injector_pressure(model, s) / 1e6, e.newton_iterations);
    for (double t : snapshots)
      if (std::abs(e.time - t) < 1e-6) io::write_snapshot(model, s, *cfg.output_dir, io::snapshot_tag(t));
    if (observer) observer(s, e);
  };
  if (sch.end_time > 0.0) out.log = coupling::run(model, state, sch, cfg.newton, track);
  out.injector_pressure_end = injector_pressure(model, state);

  if (cfg.output_dir) {
    coupling::write_run_log(out.log, *cfg.output_dir / "demo_run_log.csv");
    std::ofstream csv(*cfg.output_dir / "demo_fractures.csv");
    if (!csv) throw ConfigError("cannot write " + (*cfg.output_dir / "demo_fractures.csv").string());
    csv << "fracture,initial_shear_mpa,activation_day,opening_day\n";
    for (std::size_t f = 0; f < nf; ++f)
      csv << f + 1 << ',' << io::fmt_real(out.initial_shear[f] / 1e6) << ',' << io::fmt_real(out.activation_day[f])
          << ',' << io::fmt_real(out.opening_day[f]) << '\n';
  }
  return out;
}

}  // namespace edfm::validation
