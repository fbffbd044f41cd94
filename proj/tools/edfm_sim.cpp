#include "edfm/io/config.hpp"
#include "edfm/io/runner.hpp"
#include "edfm/validation/demo.hpp"
#include "edfm/validation/validation.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace edfm;
namespace fs = std::filesystem;

namespace {

void print_report(const validation::ConvergenceReport& r)
{
  std::printf("%s\n  %-12s %-8s %-14s %-14s %-14s\n", r.test.c_str(), "h [m]", "n_F", "L2 error", "max computed",
              "max reference");
  for (const auto& p : r.points)
    std::printf("  %-12.5g %-8d %-14.6e %-14.6e %-14.6e\n", p.h, p.n_fracture_cells, p.error, p.computed_max,
                p.reference_max);
  std::printf("  fitted exponent %.4f\n", r.exponent);
}

int run_mech(validation::MechCaseConfig cfg, const fs::path& out)
{
  fs::create_directories(out);
  cfg.profile_dir = out / "profiles";
  const auto reports = validation::run_mech_case(cfg);
  double sum = 0.0;
  for (const auto& r : reports) {
    validation::write_report_csv(r, out / (r.test + ".csv"));
    print_report(r);
    sum += r.exponent;
  }
  if (reports.size() > 1) std::printf("angle-averaged exponent %.4f\n", sum / static_cast<double>(reports.size()));
  return 0;
}

int run_flow(validation::FlowCaseConfig cfg, const fs::path& out)
{
  fs::create_directories(out);
  cfg.profile_dir = out / "profiles";
  const auto res = validation::run_flow_case(cfg);
  validation::write_report_csv(res.report, out / (res.report.test + ".csv"));
  print_report(res.report);
  std::printf("fracture pressure range [%.4f, %.4f] MPa; transient monotone: %s\n", res.p_min / 1e6, res.p_max / 1e6,
              res.transient_monotone ? "yes" : "no");
  return 0;
}

int run_demo(validation::DemoConfig cfg, const fs::path& out)
{
  cfg.output_dir = out;
  const auto res = validation::run_demo(cfg);
  std::printf("%-9s %-18s %-15s %-12s\n", "fracture", "initial |t| [MPa]", "activation [d]", "opening [d]");
  for (std::size_t f = 0; f < res.initial_shear.size(); ++f) {
    auto day = [](double d) { return d < 0.0 ? std::string("never") : fmt::format("{:.2f}", d); };
    std::printf("#%-8zu %-18.3f %-15s %-12s\n", f + 1, res.initial_shear[f] / 1e6, day(res.activation_day[f]).c_str(),
                day(res.opening_day[f]).c_str());
  }
  std::printf("injector pressure at the end %.3f MPa\n", res.injector_pressure_end / 1e6);
  return 0;
}

int run_config(const fs::path& path, const std::optional<fs::path>& out_override)
{
  auto cfg = io::parse_config(path);
  if (out_override) cfg.output.directory = *out_override;
  switch (cfg.kind) {
    case io::ScenarioKind::mech_validation: return run_mech(cfg.mech_case, cfg.output.directory);
    case io::ScenarioKind::flow_validation: return run_flow(cfg.flow_case, cfg.output.directory);
    case io::ScenarioKind::coupled: {
      const auto log = io::run_coupled_scenario(cfg);
      std::printf("%s: %zu steps to %.3f d, output in %s\n", cfg.name.c_str(), log.size(),
                  log.empty() ? 0.0 : log.back().time / 86400.0, cfg.output.directory.string().c_str());
      return 0;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Embedded-fracture flow and mechanics simulator"};
  app.require_subcommand(1);
  std::optional<fs::path> output_dir;
  std::string log_level = "info";
  app.add_option("--output-dir", output_dir, "Directory for CSV and VTK output");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* run = app.add_subcommand("run", "Run a scenario file (coupled, mech_validation or flow_validation)");
  fs::path config;
  run->add_option("config", config, "YAML scenario file")->required();

  auto* mech = app.add_subcommand("validate-mech", "Mesh convergence of fracture slip or opening");
  std::string mech_case = "shear";
  bool nonconforming = false;
  std::vector<double> angles;
  std::vector<double> levels;
  mech->add_option("--case", mech_case, "shear or sneddon")->check(CLI::IsMember({"shear", "sneddon"}));
  mech->add_flag("--nonconforming", nonconforming, "Fracture inclined to the grid");
  mech->add_option("--angles", angles, "Fracture angles [deg]");
  mech->add_option("--levels", levels, "Fracture cell counts (conforming) or spacings [m] (non-conforming)");

  auto* flow = app.add_subcommand("validate-flow", "Mesh convergence of the steady fracture pressure");
  std::vector<double> spacings;
  flow->add_option("--levels", spacings, "Grid spacings [m]");

  auto* demo = app.add_subcommand("demo-coupled", "Nine-fracture injection scenario, 60 days");
  int cells = 50;
  double days = 60.0;
  demo->add_option("--cells", cells, "Cells per horizontal direction");
  demo->add_option("--days", days, "Injection period [days]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    if (*run) return run_config(config, output_dir);
    if (*mech) {
      validation::MechCaseConfig cfg;
      cfg.props = validation::reference_mech_props();
      cfg.kind = mech_case == "shear" ? validation::MechCase::shear : validation::MechCase::opening;
      cfg.conforming = !nonconforming;
      if (cfg.kind == validation::MechCase::opening) cfg.n_fracture_cells = {2, 4, 8, 16, 32};
      if (nonconforming) cfg.angles_deg = {5.0, 10.0, 20.0, 30.0, 40.0};
      if (!angles.empty()) cfg.angles_deg = angles;
      if (!levels.empty()) {
        if (nonconforming) {
          cfg.spacings = levels;
        } else {
          cfg.n_fracture_cells.clear();
          for (double l : levels) cfg.n_fracture_cells.push_back(static_cast<int>(l));
        }
      }
      return run_mech(cfg, output_dir.value_or("output/validate_mech"));
    }
    if (*flow) {
      validation::FlowCaseConfig cfg;
      if (!spacings.empty()) cfg.spacings = spacings;
      return run_flow(cfg, output_dir.value_or("output/validate_flow"));
    }
    if (*demo) {
      validation::DemoConfig cfg;
      cfg.cells_xy = cells;
      cfg.end_days = days;
      return run_demo(cfg, output_dir.value_or("output/demo_coupled"));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
