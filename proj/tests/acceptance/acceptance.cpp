// Runs the seven acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance <unit_tests binary> [--only 1,2,...] [--output-dir DIR] [--strict]
// The exit status is nonzero only with --strict and a failing criterion, or on error.

#include "edfm/validation/demo.hpp"
#include "edfm/validation/validation.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace edfm;
using namespace edfm::validation;
namespace fs = std::filesystem;

namespace {

struct Verdict
{
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      detail << " [fails: " << what << "]";
    }
  }
};

bool monotone_decrease(const ConvergenceReport& r, std::size_t from = 0)
{
  for (std::size_t i = from + 1; i < r.points.size(); ++i)
    if (!(r.points[i].error < r.points[i - 1].error)) return false;
  return true;
}

std::string errors(const ConvergenceReport& r)
{
  std::ostringstream s;
  for (std::size_t i = 0; i < r.points.size(); ++i) s << (i ? "," : "") << fmt::format("{:.3e}", r.points[i].error);
  return s.str();
}

std::string report(int id, const std::string& title, Verdict& v, double seconds)
{
  const auto line = fmt::format("criterion {} {}: {} ({:.0f} s){}\n", id, v.pass ? "PASS" : "FAIL", title, seconds,
                                v.detail.str());
  std::fputs(line.c_str(), stdout);
  std::fflush(stdout);
  return line;
}

Verdict conforming_shear(const fs::path& out)
{
  MechCaseConfig cfg;
  cfg.props = reference_mech_props();
  cfg.n_fracture_cells = {4, 8, 16, 32};
  cfg.profile_dir = out / "profiles";
  const auto r = run_mech_case(cfg).front();
  write_report_csv(r, out / (r.test + ".csv"));
  Verdict v;
  v.detail << " errors " << errors(r) << ", exponent " << fmt::format("{:.3f}", r.exponent);
  v.require(monotone_decrease(r), "monotone error decrease");
  v.require(r.exponent >= 1.0 && r.exponent <= 2.2, "exponent in [1.0, 2.2]");
  bool over = true;
  for (const auto& p : r.points) over = over && p.computed_max >= p.reference_max;
  v.require(over, "max slip >= analytical max at every level");
  return v;
}

Verdict conforming_opening(const fs::path& out)
{
  MechCaseConfig cfg;
  cfg.kind = MechCase::opening;
  cfg.props = reference_mech_props();
  cfg.n_fracture_cells = {2, 4, 8, 16, 32};
  cfg.profile_dir = out / "profiles";
  const auto r = run_mech_case(cfg).front();
  write_report_csv(r, out / (r.test + ".csv"));
  const std::vector<ConvergencePoint> fine(r.points.end() - 3, r.points.end());
  const double q = fit_convergence(fine);
  Verdict v;
  v.detail << " errors " << errors(r) << ", fine-grid exponent " << fmt::format("{:.3f}", q) << " (all levels "
           << fmt::format("{:.3f}", r.exponent) << ")";
  bool under = true;
  for (const auto& p : r.points) under = under && p.computed_max < p.reference_max;
  v.require(under, "aperture underestimated at every level");
  v.require(monotone_decrease(r), "monotone error decrease");
  v.require(q >= 1.0 && q <= 2.0, "fine-grid exponent in [1.0, 2.0]");
  return v;
}

Verdict nonconforming(MechCase kind, const fs::path& out)
{
  MechCaseConfig cfg;
  cfg.kind = kind;
  cfg.conforming = false;
  cfg.props = reference_mech_props();
  cfg.spacings = {2.5, 1.25, 0.625};
  cfg.angles_deg = {5.0, 10.0, 20.0, 30.0, 40.0};
  cfg.profile_dir = out / "profiles";
  const auto reports = run_mech_case(cfg);
  Verdict v;
  double sum = 0.0;
  bool monotone = true;
  v.detail << " exponents";
  for (const auto& r : reports) {
    write_report_csv(r, out / (r.test + ".csv"));
    sum += r.exponent;
    monotone = monotone && monotone_decrease(r);
    v.detail << ' ' << fmt::format("{:.3f}", r.exponent);
  }
  const double mean = sum / static_cast<double>(reports.size());
  v.detail << ", mean " << fmt::format("{:.3f}", mean);
  if (kind == MechCase::shear) v.require(monotone, "per-angle monotone error decrease");
  v.require(mean >= 1.0 && mean <= 2.0, "angle-averaged exponent in [1.0, 2.0]");
  return v;
}

Verdict flow_convergence(const fs::path& out)
{
  FlowCaseConfig cfg;
  cfg.profile_dir = out / "profiles";
  const auto res = run_flow_case(cfg);
  write_report_csv(res.report, out / (res.report.test + ".csv"));
  Verdict v;
  v.detail << " errors " << errors(res.report) << ", exponent " << fmt::format("{:.3f}", res.report.exponent)
           << ", pressure range [" << fmt::format("{:.3f}, {:.3f}", res.p_min / 1e6, res.p_max / 1e6) << "] MPa";
  v.require(res.report.exponent >= 0.7 && res.report.exponent <= 1.5, "exponent in [0.7, 1.5]");
  v.require(res.p_min >= 5e6 && res.p_max <= 15e6, "pressures within [5, 15] MPa");
  v.require(res.transient_monotone, "transient profiles decrease in time");
  return v;
}

Verdict coupled_demo(const fs::path& out)
{
  DemoConfig cfg;
  cfg.output_dir = out;
  std::set<int> ever_active;  // fractures #2-#7 with any non-STICK element at any step
  const auto res = run_demo(cfg, [&](const coupling::CoupledState&, const coupling::RunLogEntry& e) {
    for (std::size_t f = 1; f < 7; ++f)
      if (e.fractures[f].slip + e.fractures[f].open > 0) ever_active.insert(static_cast<int>(f) + 1);
  });
  const auto& s = res.initial_shear;
  const auto& a = res.activation_day;
  Verdict v;
  v.detail << " initial |t| [MPa]";
  for (double x : s) v.detail << ' ' << fmt::format("{:.2f}", x / 1e6);
  v.detail << "; activation [d] #1 " << a[0] << ", #9 " << a[8] << ", #8 " << a[7] << "; #1 opens "
           << res.opening_day[0];

  auto below = [&](std::initializer_list<int> lo, std::initializer_list<int> hi) {
    for (int i : lo)
      for (int j : hi)
        if (!(s[static_cast<std::size_t>(i - 1)] < s[static_cast<std::size_t>(j - 1)])) return false;
    return true;
  };
  v.require(below({4, 5}, {1, 2, 3}) && below({1, 2, 3}, {6, 7}) && below({6, 7}, {8, 9}),
            "initial shear ordering {4,5} < {1,2,3} < {6,7} < {8,9}");
  bool first = a[0] >= 0.0;
  for (std::size_t f = 1; f < a.size(); ++f) first = first && (a[f] < 0.0 || a[f] > a[0]);
  v.require(first, "#1 activates first");
  v.require(a[8] >= 0.0 && (a[7] < 0.0 || a[8] < a[7]), "#9 activates before #8");
  v.require(ever_active.empty(), "#2-#7 remain STICK");
  v.require(res.opening_day[0] >= 0.0, "#1 reaches OPEN by day 60");
  auto within = [](double d, double target) { return d >= 0.5 * target && d <= 1.5 * target; };
  v.require(within(a[0], 15.0), "#1 activation within 7.5-22.5 d");
  v.require(within(a[8], 19.0), "#9 activation within 9.5-28.5 d");
  v.require(within(a[7], 33.0), "#8 activation within 16.5-49.5 d");
  return v;
}

Verdict property_suites(const std::string& unit_tests)
{
  // the always-on randomized and oracle suites of the unit-test binary
  const char* suites =
      "return mapping invariants over 10000 random states,"
      "jump sensitivities match central differences,"
      "monolithic Jacobian matches central differences on a 2x2x1 fractured model,"
      "random cuts match the closed-form box oracle,"
      "star-delta intersection transmissibility,"
      "closed coupled system conserves fluid volume,"
      "closed system conserves mass over a step";
  const std::string cmd = "\"" + unit_tests + "\" --no-intro --no-colors --test-case=\"" + suites + "\" 2>&1";
  Verdict v;
  std::string text;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) text += buf;
    v.require(pclose(pipe) == 0, "unit-test binary exits cleanly");
  } else {
    v.require(false, "unit-test binary runs");
  }
  // an empty filter match would also exit 0, so count the cases that ran
  int ran = -1;
  int passed = -1;
  const auto at = text.find("test cases:");
  if (at != std::string::npos) std::sscanf(text.c_str() + at, "test cases: %d | %d passed", &ran, &passed);
  v.detail << " " << passed << " of 7 suites passed";
  v.require(ran == 7 && passed == 7, "all 7 property suites ran and passed");
  return v;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Acceptance criteria"};
  std::string unit_tests;
  std::vector<int> only;
  fs::path out = "acceptance_output";
  bool strict = false;
  app.add_option("unit_tests", unit_tests, "Path of the unit-test executable")->required();
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  app.add_option("--output-dir", out, "Where CSV reports go");
  app.add_flag("--strict", strict, "Exit nonzero when a criterion fails");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  auto selected = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"conforming shear convergence", [&] { return conforming_shear(out / "c1"); }},
      {"conforming opening convergence", [&] { return conforming_opening(out / "c2"); }},
      {"non-conforming shear convergence", [&] { return nonconforming(MechCase::shear, out / "c3"); }},
      {"non-conforming opening convergence", [&] { return nonconforming(MechCase::opening, out / "c4"); }},
      {"flow convergence", [&] { return flow_convergence(out / "c5"); }},
      {"coupled nine-fracture injection", [&] { return coupled_demo(out / "c6"); }},
      {"property suites", [&] { return property_suites(unit_tests); }}};

  // the PASS/FAIL lines are also kept in DIR/summary.txt, which ctest prints after the run
  fs::create_directories(out);
  std::ofstream summary(out / "summary.txt");
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [error: " << e.what() << "]";
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary << report(id, criteria[i].first, v, sec) << std::flush;
    failed += v.pass ? 0 : 1;
  }
  return strict && failed > 0 ? 1 : 0;
}
