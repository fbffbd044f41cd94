#include "edfm/io/config.hpp"

#include "edfm/errors.hpp"
#include "edfm/units.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace edfm::io {

namespace {

using mesh::Vec3;

[[noreturn]] void fail(const std::string& source, const YAML::Node& at, const std::string& msg)
{
  const auto m = at.Mark();
  std::ostringstream s;
  s << source;
  if (!m.is_null()) s << ':' << m.line + 1;
  s << ": " << msg;
  throw ConfigError(s.str());
}

/// A YAML mapping whose keys are consumed as they are read; finish() rejects
/// whatever was not.
class Section
{
 public:
  Section(const YAML::Node& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source)
  {
    if (!node_.IsMap()) fail(source_, node_, "'" + path_ + "' must be a mapping");
  }

  [[nodiscard]] YAML::Node peek(const std::string& key) const
  {
    const YAML::Node& n = node_;
    return n[key];
  }
  [[nodiscard]] bool has(const std::string& key) const { return static_cast<bool>(peek(key)); }

  YAML::Node node(const std::string& key)
  {
    used_.insert(key);
    return peek(key);
  }

  YAML::Node required(const std::string& key)
  {
    auto n = node(key);
    if (!n || n.IsNull()) fail(source_, node_, "missing required field '" + name(key) + "'");
    return n;
  }

  double number(const YAML::Node& n, const std::string& key) const
  {
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(source_, n, "'" + name(key) + "' must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(source_, n, "'" + name(key) + "' must be a number");
    }
  }

  double real(const std::string& key, double fallback, double scale = 1.0)
  {
    auto n = node(key);
    return n ? number(n, key) * scale : fallback;
  }
  double required_real(const std::string& key, double scale = 1.0) { return number(required(key), key) * scale; }

  double positive(const std::string& key, double fallback, double scale = 1.0)
  {
    const double v = real(key, fallback, scale);
    if (!(v > 0.0)) fail(source_, has(key) ? peek(key) : node_, "'" + name(key) + "' must be positive");
    return v;
  }
  double non_negative(const std::string& key, double fallback, double scale = 1.0)
  {
    const double v = real(key, fallback, scale);
    if (!(v >= 0.0)) fail(source_, has(key) ? peek(key) : node_, "'" + name(key) + "' must not be negative");
    return v;
  }

  int integer(const std::string& key, int fallback)
  {
    auto n = node(key);
    if (!n) return fallback;
    try {
      return n.as<int>();
    } catch (const YAML::BadConversion&) {
      fail(source_, n, "'" + name(key) + "' must be an integer");
    }
  }

  bool boolean(const std::string& key, bool fallback)
  {
    auto n = node(key);
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(source_, n, "'" + name(key) + "' must be true or false");
    }
  }

  std::string text(const std::string& key, const std::string& fallback)
  {
    auto n = node(key);
    if (!n) return fallback;
    if (!n.IsScalar()) fail(source_, n, "'" + name(key) + "' must be a string");
    return n.as<std::string>();
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback, double scale = 1.0)
  {
    auto n = node(key);
    if (!n) return fallback;
    if (!n.IsSequence()) fail(source_, n, "'" + name(key) + "' must be a list");
    std::vector<double> out;
    for (const auto& v : n) out.push_back(number(v, key) * scale);
    return out;
  }

  std::vector<double> required_reals(const std::string& key, std::size_t size, double scale = 1.0)
  {
    auto n = required(key);
    auto v = reals(key, {}, scale);
    if (size > 0 && v.size() != size)
      fail(source_, n, "'" + name(key) + "' must have " + std::to_string(size) + " entries");
    return v;
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback, double scale = 1.0)
  {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const auto v = required_reals(key, 3, scale);
    return {v[0], v[1], v[2]};
  }

  Section child(const std::string& key) { return {required(key), name(key), source_}; }

  void finish() const
  {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.contains(key)) fail(source_, kv.first, "unknown key '" + name(key) + "'");
    }
  }

  [[nodiscard]] std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[nodiscard]] const std::string& source() const { return source_; }
  [[nodiscard]] const YAML::Node& yaml() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

mesh::Side parse_side(const std::string& source, const YAML::Node& n)
{
  static const std::map<std::string, mesh::Side> sides{{"xmin", mesh::Side::xmin}, {"xmax", mesh::Side::xmax},
                                                       {"ymin", mesh::Side::ymin}, {"ymax", mesh::Side::ymax},
                                                       {"zmin", mesh::Side::zmin}, {"zmax", mesh::Side::zmax}};
  const auto s = n.as<std::string>();
  const auto it = sides.find(s);
  if (it == sides.end()) fail(source, n, "unknown side '" + s + "' (expected xmin, xmax, ymin, ymax, zmin or zmax)");
  return it->second;
}

/// Elastic and contact properties. Young's modulus and Poisson's ratio are
/// required; everything else has a default.
mechanics::MechProps parse_mechanics(Section s)
{
  mechanics::MechProps m;
  m.young = s.required_real("young_modulus", units::megapascal);
  m.poisson = s.required_real("poisson_ratio");
  m.biot = s.real("biot", 1.0);
  m.friction = s.non_negative("friction", 0.6);
  m.dilation = std::tan(s.non_negative("dilation_angle", 0.0) * std::numbers::pi / 180.0);
  m.cohesion = s.non_negative("cohesion", 0.0, units::megapascal);
  m.hardening = s.non_negative("hardening", 0.0, units::megapascal);
  m.density = s.non_negative("density", 0.0);
  s.finish();
  try {
    m.validate();
  } catch (const ConfigError& e) {
    fail(s.source(), s.yaml(), std::string("mechanics: ") + e.what());
  }
  return m;
}

flow::FlowProps parse_flow(Section s)
{
  flow::FlowProps f;
  auto k = s.required("permeability");
  if (k.IsSequence()) {
    const auto v = s.required_reals("permeability", 3, units::millidarcy);
    f.permeability = {v[0], v[1], v[2]};
  } else {
    const double v = s.required_real("permeability", units::millidarcy);
    f.permeability = {v, v, v};
  }
  const double phi = s.required_real("porosity");
  if (!(phi > 0.0 && phi < 1.0)) fail(s.source(), s.node("porosity"), "'flow.porosity' must lie in (0, 1)");
  f.porosity = phi;
  f.compressibility = s.non_negative("compressibility", 1e-9, units::per_megapascal);
  f.viscosity = s.positive("viscosity", 1e-3, units::centipoise);
  f.density = s.positive("density", 1000.0);
  s.finish();
  try {
    f.validate();
  } catch (const ConfigError& e) {
    fail(s.source(), s.yaml(), std::string("flow: ") + e.what());
  }
  return f;
}

std::vector<FractureSpec> parse_fractures(const YAML::Node& list, const std::string& source)
{
  if (!list.IsSequence()) fail(source, list, "'fractures' must be a list");
  std::vector<FractureSpec> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "fractures[" + std::to_string(i) + "]", source);
    FractureSpec f;
    f.name = s.text("name", "F" + std::to_string(i + 1));
    if (!names.insert(f.name).second) fail(source, list[i], "duplicate fracture name '" + f.name + "'");
    f.center = s.vec3("center", Vec3::Zero(), 1.0);
    if (!s.has("center")) s.required("center");
    f.length = s.positive("length", 0.0);
    f.height = s.positive("height", 0.0);
    f.strike_deg = s.real("strike", 0.0);
    f.dip_deg = s.real("dip", 90.0);
    if (!(f.dip_deg > 0.0 && f.dip_deg <= 90.0)) fail(source, s.node("dip"), "'dip' must lie in (0, 90] degrees");
    f.conductivity_mdm = s.non_negative("conductivity", 0.0);
    f.aperture = s.positive("aperture", 1e-3, 1e-3);
    s.finish();
    out.push_back(f);
  }
  return out;
}

std::vector<flow::WellConfig> parse_wells(const YAML::Node& list, const std::vector<FractureSpec>& fractures,
                                          const std::string& source)
{
  if (!list.IsSequence()) fail(source, list, "'wells' must be a list");
  std::vector<flow::WellConfig> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "wells[" + std::to_string(i) + "]", source);
    flow::WellConfig w;
    w.name = s.text("name", "W" + std::to_string(i + 1));
    const auto control_node = s.required("control");
    const auto control = control_node.as<std::string>();
    if (control == "rate") {
      w.control = flow::WellControl::rate;
      w.value = s.required_real("value", 1.0 / units::day);  // m^3/day, positive injects
    } else if (control == "bhp") {
      w.control = flow::WellControl::bhp;
      w.value = s.required_real("value", units::megapascal);
    } else {
      fail(source, control_node, "well control must be 'rate' or 'bhp', got '" + control + "'");
    }
    const auto xy = s.required_reals("location", 2);
    w.location = {xy[0], xy[1], 0.0};
    w.z_top = s.real("z_top", w.z_top);
    w.z_bottom = s.real("z_bottom", w.z_bottom);
    w.radius = s.positive("radius", w.radius);
    w.skin = s.real("skin", 0.0);
    if (auto refs = s.node("fractures")) {
      if (!refs.IsSequence()) fail(source, refs, "'" + s.name("fractures") + "' must be a list of fracture names");
      for (const auto& r : refs) {
        const auto want = r.as<std::string>();
        int found = -1;
        for (std::size_t f = 0; f < fractures.size(); ++f)
          if (fractures[f].name == want) found = static_cast<int>(f);
        if (found < 0) fail(source, r, "well '" + w.name + "' names unknown fracture '" + want + "'");
        w.fractures.push_back(found);
      }
    }
    s.finish();
    out.push_back(w);
  }
  return out;
}

mechanics::BoundaryConditionsMech parse_boundary(const YAML::Node& list, const std::string& source)
{
  if (!list.IsSequence()) fail(source, list, "'boundary' must be a list of face conditions");
  mechanics::BoundaryConditionsMech bc;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "boundary[" + std::to_string(i) + "]", source);
    mechanics::FaceBC f;
    f.side = parse_side(source, s.required("side"));
    if (auto d = s.node("displacement")) {
      Section ds(d, s.name("displacement"), source);
      const std::array<const char*, 3> comps{"x", "y", "z"};
      for (std::size_t c = 0; c < 3; ++c)
        if (ds.has(comps[c])) f.displacement[c] = ds.required_real(comps[c]);
      ds.finish();
    }
    f.far_field = s.boolean("far_field", false);
    f.traction = s.vec3("traction", Vec3::Zero(), units::megapascal);
    if (f.far_field && s.has("traction"))
      fail(source, list[i], "a face takes either 'far_field' or 'traction', not both");
    s.finish();
    bc.faces.push_back(f);
  }
  return bc;
}

mechanics::Voigt parse_stress(Section& s)
{
  const auto n = s.required("stress");
  const auto v = s.reals("stress", {}, units::megapascal);
  mechanics::Voigt out = mechanics::Voigt::Zero();
  if (v.size() != 3 && v.size() != 6)
    fail(s.source(), n, "'initial.stress' needs 3 (xx, yy, zz) or 6 (xx, yy, zz, xy, yz, xz) entries");
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

void parse_schedule(Section s, coupling::Schedule& sch)
{
  sch.end_time = s.required_real("end", units::day);
  if (!(sch.end_time > 0.0)) fail(s.source(), s.node("end"), "'schedule.end' must be positive");
  sch.dt_initial = s.positive("dt_initial", sch.dt_initial, units::day);
  sch.dt_min = s.positive("dt_min", sch.dt_min, units::day);
  sch.dt_max = s.positive("dt_max", sch.dt_max, units::day);
  sch.growth = s.positive("growth", sch.growth);
  sch.cut = s.positive("cut", sch.cut);
  sch.max_cuts = s.integer("max_cuts", sch.max_cuts);
  sch.report_times = s.reals("report_days", {}, units::day);
  s.finish();
}

void parse_solver(Section s, coupling::NewtonOptions& o)
{
  o.max_iterations = s.integer("max_newton_iterations", o.max_iterations);
  o.tol_mech = s.positive("tol_mech", o.tol_mech);
  o.tol_flow = s.positive("tol_flow", o.tol_flow);
  o.linear.tolerance = s.positive("linear_tolerance", o.linear.tolerance);
  s.finish();
}

OutputSpec parse_output(Section s)
{
  OutputSpec o;
  o.directory = s.text("directory", o.directory.string());
  o.vtk = s.boolean("vtk", o.vtk);
  o.fracture_csv = s.boolean("fracture_csv", o.fracture_csv);
  s.finish();
  return o;
}

void parse_coupled(Section& top, ScenarioConfig& c)
{
  {
    Section g = top.child("grid");
    const auto n = g.required("cells");
    const auto cells = g.required_reals("cells", 3);
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(cells[i] >= 1.0) || cells[i] != std::floor(cells[i]))
        fail(top.source(), n, "'grid.cells' entries must be positive integers");
      c.grid.cells[i] = static_cast<int>(cells[i]);
    }
    c.grid.extent = g.vec3("extent", Vec3::Zero());
    if (!g.has("extent")) g.required("extent");
    if (!(c.grid.extent.minCoeff() > 0.0)) fail(top.source(), g.node("extent"), "'grid.extent' must be positive");
    c.grid.origin = g.vec3("origin", Vec3::Zero());
    g.finish();
  }
  if (top.has("fractures")) c.fractures = parse_fractures(top.node("fractures"), top.source());
  c.mech = parse_mechanics(top.child("mechanics"));
  c.flow = parse_flow(top.child("flow"));
  c.flow.biot = c.mech.biot;
  c.flow.bulk_modulus = c.mech.bulk_modulus();
  const double g = top.non_negative("gravity", 0.0);
  c.mech.gravity = {0.0, 0.0, -g};
  c.flow.gravity = {0.0, 0.0, -g};
  {
    Section s = top.child("initial");
    c.initial_stress = parse_stress(s);
    c.initial_pressure = s.required_real("pressure", units::megapascal);
    s.finish();
  }
  c.bc = parse_boundary(top.required("boundary"), top.source());
  c.bc.far_field = c.initial_stress;
  if (top.has("wells")) c.wells = parse_wells(top.node("wells"), c.fractures, top.source());
  parse_schedule(top.child("schedule"), c.schedule);
  if (top.has("solver")) parse_solver(top.child("solver"), c.newton);
}

void parse_mech_validation(Section& top, ScenarioConfig& c)
{
  auto& m = c.mech_case;
  const auto kn = top.required("case");
  const auto kind = kn.as<std::string>();
  if (kind == "shear")
    m.kind = validation::MechCase::shear;
  else if (kind == "opening" || kind == "sneddon")
    m.kind = validation::MechCase::opening;
  else
    fail(top.source(), kn, "'case' must be 'shear' or 'sneddon', got '" + kind + "'");
  m.conforming = top.boolean("conforming", true);
  if (m.kind == validation::MechCase::opening && m.conforming) m.n_fracture_cells = {2, 4, 8, 16, 32};
  if (top.has("levels")) {
    m.n_fracture_cells.clear();
    for (double v : top.reals("levels", {})) m.n_fracture_cells.push_back(static_cast<int>(v));
  }
  m.spacings = top.reals("spacings", m.spacings);
  m.angles_deg = top.reals("angles", m.angles_deg);
  m.props = parse_mechanics(top.child("mechanics"));
  m.load = top.positive("load", m.load, units::megapascal);
  m.fracture_length = top.positive("fracture_length", m.fracture_length);
  m.domain = top.positive("domain", m.domain);
  m.thickness = top.positive("thickness", m.thickness);
  m.margin = top.positive("margin", m.margin);
  m.growth = top.positive("growth", m.growth);
  c.mech = m.props;
}

void parse_flow_validation(Section& top, ScenarioConfig& c)
{
  auto& f = c.flow_case;
  f.spacings = top.reals("spacings", f.spacings);
  f.reference_spacing = top.positive("reference_spacing", f.reference_spacing);
  f.props = parse_flow(top.child("flow"));
  // rigid matrix: b = porosity leaves porosity times compressibility as storage
  f.props.biot = f.props.porosity;
  f.fracture_length = top.positive("fracture_length", f.fracture_length);
  f.fracture_strike_deg = top.real("fracture_strike", f.fracture_strike_deg);
  f.conductivity_mdm = top.positive("conductivity", f.conductivity_mdm);
  f.initial_pressure = top.real("initial_pressure", f.initial_pressure, units::megapascal);
  f.injector_bhp = top.real("injector_bhp", f.injector_bhp, units::megapascal);
  f.producer_bhp = top.real("producer_bhp", f.producer_bhp, units::megapascal);
  f.well_offset = top.positive("well_offset", f.well_offset);
  f.domain = top.positive("domain", f.domain);
  f.thickness = top.positive("thickness", f.thickness);
  if (top.has("transient")) {
    Section t = top.child("transient");
    f.transient_spacing = t.positive("spacing", f.transient_spacing);
    f.transient_days = t.positive("days", f.transient_days);
    f.transient_steps = t.integer("steps", f.transient_steps);
    f.snapshot_days = t.reals("snapshot_days", f.snapshot_days);
    t.finish();
  }
  c.flow = f.props;
}

ScenarioConfig parse_root(const YAML::Node& root, const std::string& source)
{
  if (!root || root.IsNull()) throw ConfigError(source + ": empty scenario file");
  Section top(root, "", source);
  ScenarioConfig c;
  const auto kind = top.text("kind", "coupled");
  if (kind == "coupled")
    c.kind = ScenarioKind::coupled;
  else if (kind == "mech_validation")
    c.kind = ScenarioKind::mech_validation;
  else if (kind == "flow_validation")
    c.kind = ScenarioKind::flow_validation;
  else
    fail(source, top.node("kind"), "unknown kind '" + kind + "' (expected coupled, mech_validation, flow_validation)");
  c.name = top.text("name", "scenario");
  switch (c.kind) {
    case ScenarioKind::coupled: parse_coupled(top, c); break;
    case ScenarioKind::mech_validation: parse_mech_validation(top, c); break;
    case ScenarioKind::flow_validation: parse_flow_validation(top, c); break;
  }
  if (top.has("output")) c.output = parse_output(top.child("output"));
  top.finish();
  return c;
}

}  // namespace

ScenarioConfig parse_config_string(const std::string& text, const std::string& source_name)
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_root(root, source_name);
}

ScenarioConfig parse_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": file not found or unreadable");
  std::ostringstream text;
  text << in.rdbuf();
  auto c = parse_config_string(text.str(), path.string());
  c.source = path;
  return c;
}

coupling::CoupledModelInput make_model_input(const ScenarioConfig& c)
{
  if (c.kind != ScenarioKind::coupled) throw ConfigError(c.source.string() + ": not a coupled scenario");
  coupling::CoupledModelInput in{mesh::build_cartesian_grid(c.grid), {}, c.mech, c.flow, c.wells, c.bc,
                                 c.initial_stress, c.initial_pressure};
  for (std::size_t i = 0; i < c.fractures.size(); ++i) {
    const auto& f = c.fractures[i];
    in.fractures.push_back(mesh::make_fracture(static_cast<int>(i), f.center, f.length, f.height, f.strike_deg,
                                               f.dip_deg, f.conductivity_mdm, f.aperture));
  }
  return in;
}

}  // namespace edfm::io
