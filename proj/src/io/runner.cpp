#include "edfm/io/runner.hpp"

#include "edfm/io/vtk.hpp"
#include "edfm/units.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>

namespace edfm::io {

std::string snapshot_tag(double time)
{
  const double days = time / units::day;
  const double whole = std::round(days);
  char buf[32];
  if (std::abs(days - whole) < 1e-6)
    std::snprintf(buf, sizeof buf, "day_%03.0f", whole);
  else
    std::snprintf(buf, sizeof buf, "day_%06.2f", days);
  return buf;
}

std::vector<coupling::RunLogEntry> run_coupled_scenario(const ScenarioConfig& config)
{
  const auto model = coupling::build_coupled_model(make_model_input(config));
  spdlog::info("{}: {} cells, {} fracture CVs, {} unknowns", config.name, model.grid->n_cells(), model.fm->n_cvs(),
               model.size());
  auto state = coupling::initialize(model, config.initial_pressure);
  const auto& out = config.output;
  write_snapshot(model, state, out.directory, snapshot_tag(0.0), out.vtk, out.fracture_csv);

  const auto& sch = config.schedule;
  auto observe = [&](const coupling::CoupledState& s, const coupling::RunLogEntry& e) {
    bool report = std::abs(e.time - sch.end_time) < 1e-6;
    for (double t : sch.report_times) report = report || std::abs(e.time - t) < 1e-6;
    spdlog::debug("{}: t = {:.3f} d, {} Newton iterations", config.name, e.time / units::day, e.newton_iterations);
    if (report) write_snapshot(model, s, out.directory, snapshot_tag(e.time), out.vtk, out.fracture_csv);
  };
  auto log = coupling::run(model, state, sch, config.newton, observe);
  coupling::write_run_log(log, out.directory / "run_log.csv");
  return log;
}

}  // namespace edfm::io
