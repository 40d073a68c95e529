#pragma once

// TOML case files. See cases/annulus.toml for an annotated example of every
// key. Relative mesh and source-table paths resolve against the directory of
// the case file.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "dsc/boundary.hpp"
#include "dsc/boussinesq.hpp"
#include "dsc/errors.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/mesh_io.hpp"
#include "dsc/pressure.hpp"
#include "dsc/simulation.hpp"

namespace dsc {

struct InitialState {
  double T = 0.0;
  Vec3 u{};
  double p = 0.0;
};

struct RunControl {
  double end_time = std::numeric_limits<double>::infinity();
  std::uint64_t max_steps = 0;  // 0: no step limit
  double steady_tol = 0.0;      // 0: no steady-state stop
  int steady_window = 100;      // steps between steady-state checks
};

struct OutputConfig {
  std::string directory = "output";
  int period = 100;  // steps between diagnostics rows and VTK frames
  bool vtk = true;
  bool checkpoint = true;
};

struct SimConfig {
  SimSetup setup;
  InitialState initial;
  RunControl run;
  OutputConfig output;
};

namespace detail {

inline void check_keys(const toml::table& t, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : t) {
    const auto key = std::string(k.str());
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline const toml::table* section(const toml::table& root, const char* name) {
  const auto* node = root.get(name);
  if (!node) return nullptr;
  if (!node->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
  return node->as_table();
}

inline std::optional<double> opt_number(const toml::table& t, const char* key, const std::string& where) {
  const auto* node = t.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value<double>()) return *v;
  throw ConfigError(where + "." + key + " must be a number");
}

inline double number(const toml::table& t, const char* key, const std::string& where, double def) {
  return opt_number(t, key, where).value_or(def);
}

inline double required_number(const toml::table& t, const char* key, const std::string& where) {
  auto v = opt_number(t, key, where);
  if (!v) throw ConfigError("missing " + where + "." + key);
  return *v;
}

inline std::int64_t integer(const toml::table& t, const char* key, const std::string& where,
                            std::int64_t def) {
  const auto* node = t.get(key);
  if (!node) return def;
  if (auto v = node->value<std::int64_t>(); v && node->is_integer()) return *v;
  throw ConfigError(where + "." + key + " must be an integer");
}

inline std::optional<std::string> opt_string(const toml::table& t, const char* key,
                                             const std::string& where) {
  const auto* node = t.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value<std::string>()) return *v;
  throw ConfigError(where + "." + key + " must be a string");
}

inline bool boolean(const toml::table& t, const char* key, const std::string& where, bool def) {
  const auto* node = t.get(key);
  if (!node) return def;
  if (auto v = node->value<bool>()) return *v;
  throw ConfigError(where + "." + key + " must be true or false");
}

inline std::vector<double> numbers(const toml::node& node, const std::string& what) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *arr) {
    auto v = e.value<double>();
    if (!v) throw ConfigError(what + " must be an array of numbers");
    out.push_back(*v);
  }
  return out;
}

inline std::optional<Vec3> opt_vec3(const toml::table& t, const char* key, const std::string& where) {
  const auto* node = t.get(key);
  if (!node) return std::nullopt;
  const auto v = numbers(*node, where + "." + key);
  if (v.size() != 3) throw ConfigError(where + "." + key + " needs 3 components");
  return Vec3{v[0], v[1], v[2]};
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path q(p);
  return q.is_absolute() ? q : base / q;
}

inline HexMesh mesh_from_config(const toml::table& m, const std::filesystem::path& base) {
  check_keys(m, "[mesh]", {"generator", "file", "cells", "extent", "origin", "n_r", "n_theta", "n_z",
                           "r_in", "r_out", "length"});
  const auto file = opt_string(m, "file", "mesh");
  const auto gen = opt_string(m, "generator", "mesh");
  if (file && gen) throw ConfigError("[mesh] takes either 'file' or 'generator', not both");
  if (file) return load_mesh(resolve(base, *file).string());
  if (!gen) throw ConfigError("[mesh] needs 'generator' or 'file'");
  if (*gen == "box") {
    const auto* cells = m.get("cells");
    if (!cells) throw ConfigError("missing mesh.cells");
    const auto n = numbers(*cells, "mesh.cells");
    if (n.size() != 3) throw ConfigError("mesh.cells needs 3 counts");
    return gen_box(static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2]),
                   opt_vec3(m, "extent", "mesh").value_or(Vec3{1, 1, 1}),
                   opt_vec3(m, "origin", "mesh").value_or(Vec3{}));
  }
  if (*gen == "annulus") {
    return gen_annulus(static_cast<int>(integer(m, "n_r", "mesh", 4)),
                       static_cast<int>(integer(m, "n_theta", "mesh", 16)),
                       static_cast<int>(integer(m, "n_z", "mesh", 1)),
                       required_number(m, "r_in", "mesh"), required_number(m, "r_out", "mesh"),
                       required_number(m, "length", "mesh"));
  }
  throw ConfigError("unknown mesh generator '" + *gen + "'");
}

/// Moves boundary faces matching a selector into patch `name`, creating it if
/// needed. Patches left without faces are dropped.
inline void apply_selector(HexMesh& mesh, const std::string& name, const toml::table& sel,
                           const std::string& where) {
  check_keys(sel, where, {"type", "min", "max", "r_min", "r_max", "faces"});
  const auto type = opt_string(sel, "type", where).value_or(sel.get("faces") ? "faces" : "");
  std::function<bool(FaceRef, const Point3&)> match;
  if (type == "box") {
    const auto lo = opt_vec3(sel, "min", where);
    const auto hi = opt_vec3(sel, "max", where);
    if (!lo || !hi) throw ConfigError(where + " box selector needs min and max");
    match = [lo = *lo, hi = *hi](FaceRef, const Point3& p) {
      for (int k = 0; k < 3; ++k)
        if (p[k] < lo[k] || p[k] > hi[k]) return false;
      return true;
    };
  } else if (type == "shell") {
    const double r0 = required_number(sel, "r_min", where);
    const double r1 = required_number(sel, "r_max", where);
    match = [r0, r1](FaceRef, const Point3& p) {
      const double r = std::hypot(p.x, p.y);
      return r >= r0 && r <= r1;
    };
  } else if (type == "faces") {
    const auto* arr = sel.get("faces") ? sel.get("faces")->as_array() : nullptr;
    if (!arr) throw ConfigError(where + " faces selector needs 'faces = [[cell, face], ...]'");
    std::set<std::pair<CellId, int>> set;
    for (const auto& e : *arr) {
      const auto v = numbers(e, where + ".faces entry");
      if (v.size() != 2) throw ConfigError(where + ".faces entries are [cell, face]");
      set.insert({static_cast<CellId>(v[0]), static_cast<int>(v[1])});
    }
    match = [set](FaceRef f, const Point3&) { return set.count({f.cell, f.face}) > 0; };
  } else {
    throw ConfigError(where + " has unknown selector type '" + type + "'");
  }

  auto it = std::find_if(mesh.patches.begin(), mesh.patches.end(),
                         [&](const Patch& p) { return p.name == name; });
  if (it == mesh.patches.end()) {
    mesh.patches.push_back({name, {}});
    it = std::prev(mesh.patches.end());
  }
  const auto target = static_cast<std::size_t>(it - mesh.patches.begin());

  // Boundary faces not tagged by any patch are candidates too.
  const auto topo = build_topology(mesh);
  std::vector<FaceRef> picked;
  for (const auto& link : topo.links) {
    if (link.interior()) continue;
    const auto g = build_cell_geometry(mesh.cell_vertices(link.a.cell));
    if (match(link.a, g.face_centroids[link.a.face])) picked.push_back(link.a);
  }
  for (std::size_t p = 0; p < mesh.patches.size(); ++p) {
    if (p == target) continue;
    auto& faces = mesh.patches[p].faces;
    std::erase_if(faces, [&](const FaceRef& f) {
      return std::find(picked.begin(), picked.end(), f) != picked.end();
    });
  }
  auto& tf = mesh.patches[target].faces;
  for (const auto& f : picked)
    if (std::find(tf.begin(), tf.end(), f) == tf.end()) tf.push_back(f);
  std::erase_if(mesh.patches, [](const Patch& p) { return p.faces.empty(); });
}

inline VelocityKind velocity_kind(const std::string& s, const std::string& where) {
  if (s == "no_slip") return VelocityKind::NoSlip;
  if (s == "free_slip") return VelocityKind::FreeSlip;
  throw ConfigError(where + ".velocity must be 'no_slip' or 'free_slip'");
}

inline ThermalKind thermal_kind(const std::string& s, const std::string& where) {
  if (s == "adiabatic") return ThermalKind::Adiabatic;
  if (s == "isothermal") return ThermalKind::Isothermal;
  throw ConfigError(where + ".thermal must be 'adiabatic' or 'isothermal'");
}

/// Cells adjacent to a patch with the patch face area each one carries.
inline std::map<CellId, double> patch_cell_areas(const HexMesh& mesh, const std::string& name) {
  for (const auto& p : mesh.patches) {
    if (p.name != name) continue;
    std::map<CellId, double> out;
    for (const auto& f : p.faces) {
      const auto g = build_cell_geometry(mesh.cell_vertices(f.cell));
      out[f.cell] += norm(g.f[f.face]);
    }
    return out;
  }
  throw ConfigError("heat source names unknown patch '" + name + "'");
}

}  // namespace detail

inline SimConfig parse_config(const toml::table& root, const std::filesystem::path& base = ".") {
  using namespace detail;
  check_keys(root, "case file",
             {"mesh", "fluid", "initial", "source", "boundary", "time", "sor", "output", "les"});
  SimConfig cfg;
  auto& s = cfg.setup;

  const auto* mesh = section(root, "mesh");
  if (!mesh) throw ConfigError("missing [mesh] section");
  s.mesh = mesh_from_config(*mesh, base);

  const auto* fluid = section(root, "fluid");
  if (!fluid) throw ConfigError("missing [fluid] section");
  check_keys(*fluid, "[fluid]",
             {"alpha", "mu", "rho_inf", "beta", "gravity", "T_inf", "heat_capacity"});
  s.fluid.alpha = required_number(*fluid, "alpha", "fluid");
  s.fluid.mu = required_number(*fluid, "mu", "fluid");
  s.fluid.rho_inf = required_number(*fluid, "rho_inf", "fluid");
  s.fluid.beta = number(*fluid, "beta", "fluid", 0.0);
  s.fluid.g = opt_vec3(*fluid, "gravity", "fluid").value_or(Vec3{0, 0, -9.81});
  s.fluid.T_inf = required_number(*fluid, "T_inf", "fluid");
  const double cp = number(*fluid, "heat_capacity", "fluid", 1005.0);
  s.fluid.validate();

  cfg.initial.T = s.fluid.T_inf;
  if (const auto* ini = section(root, "initial")) {
    check_keys(*ini, "[initial]", {"T", "u", "p"});
    cfg.initial.T = number(*ini, "T", "initial", cfg.initial.T);
    cfg.initial.u = opt_vec3(*ini, "u", "initial").value_or(Vec3{});
    cfg.initial.p = number(*ini, "p", "initial", 0.0);
  }

  // Boundary selectors reshape the patch list, so they run before sources.
  std::vector<std::pair<std::string, BoundaryCondition>> bcs;
  if (const auto* node = root.get("boundary")) {
    const auto* arr = node->as_array();
    if (!arr) throw ConfigError("boundary entries are written as [[boundary]] tables");
    int idx = 0;
    for (const auto& e : *arr) {
      const auto* b = e.as_table();
      const std::string where = "boundary[" + std::to_string(idx++) + "]";
      if (!b) throw ConfigError(where + " must be a table");
      check_keys(*b, where, {"patch", "velocity", "thermal", "T_wall", "selector"});
      const auto name = opt_string(*b, "patch", where);
      if (!name) throw ConfigError(where + " needs a patch name");
      BoundaryCondition bc;
      bc.velocity = velocity_kind(opt_string(*b, "velocity", where).value_or("no_slip"), where);
      bc.thermal = thermal_kind(opt_string(*b, "thermal", where).value_or("adiabatic"), where);
      if (bc.thermal == ThermalKind::Isothermal) {
        const auto tw = opt_number(*b, "T_wall", where);
        if (!tw) throw ConfigError(where + " (patch '" + *name + "') is isothermal but has no T_wall");
        bc.wall_temperature = *tw;
      }
      if (const auto* sel = b->get("selector")) {
        if (!sel->is_table()) throw ConfigError(where + ".selector must be a table");
        apply_selector(s.mesh, *name, *sel->as_table(), where + ".selector");
      }
      bcs.emplace_back(*name, bc);
    }
  }
  for (const auto& [name, bc] : bcs) {
    if (std::none_of(s.mesh.patches.begin(), s.mesh.patches.end(),
                     [&](const Patch& p) { return p.name == name; }))
      throw ConfigError("boundary condition names unknown patch '" + name + "'");
    if (!s.boundaries.emplace(name, bc).second)
      throw ConfigError("patch '" + name + "' has more than one boundary condition");
  }

  const auto ncells = s.mesh.num_cells();
  if (const auto* src = section(root, "source")) {
    check_keys(*src, "[source]", {"q", "table", "patch"});
    std::vector<double> q(ncells, number(*src, "q", "source", 0.0));
    if (const auto table = opt_string(*src, "table", "source")) {
      const auto path = resolve(base, *table);
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open heat source table '" + path.string() + "'");
      std::string line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::size_t cell = 0;
        double v = 0.0;
        if (!(ss >> cell >> v) || cell >= ncells)
          throw ConfigError("heat source table line " + std::to_string(lineno) + " is invalid");
        q[cell] += v;
      }
    }
    if (const auto* node = src->get("patch")) {
      const auto* arr = node->as_array();
      if (!arr) throw ConfigError("patch sources are written as [[source.patch]] tables");
      int idx = 0;
      for (const auto& e : *arr) {
        const auto* t = e.as_table();
        const std::string where = "source.patch[" + std::to_string(idx++) + "]";
        if (!t) throw ConfigError(where + " must be a table");
        check_keys(*t, where, {"patch", "q", "power"});
        const auto name = opt_string(*t, "patch", where);
        if (!name) throw ConfigError(where + " needs a patch name");
        const auto cells = patch_cell_areas(s.mesh, *name);
        const auto qv = opt_number(*t, "q", where);
        const auto pw = opt_number(*t, "power", where);
        if (qv.has_value() == pw.has_value()) throw ConfigError(where + " needs exactly one of q, power");
        double area = 0.0;
        for (const auto& [c, a] : cells) area += a;
        for (const auto& [c, a] : cells) {
          if (qv) {
            q[c] += *qv;
          } else {
            const auto g = build_cell_geometry(s.mesh.cell_vertices(c));
            q[c] += *pw * (a / area) / (s.fluid.rho_inf * cp * g.volume);
          }
        }
      }
    }
    if (std::any_of(q.begin(), q.end(), [](double v) { return v != 0.0; })) s.source.q = std::move(q);
  }

  const auto* time = section(root, "time");
  if (!time) throw ConfigError("missing [time] section");
  check_keys(*time, "[time]", {"tau", "safety", "u_estimate", "end_time", "max_steps", "steady_tol",
                               "steady_window"});
  if (const auto* tau = time->get("tau"); tau && tau->is_string()) {
    if (*tau->value<std::string>() != "auto") throw ConfigError("time.tau must be a number or \"auto\"");
    s.tau = stable_timestep(build_geometry(s.mesh), s.fluid,
                            number(*time, "u_estimate", "time", 0.0),
                            number(*time, "safety", "time", 0.5));
  } else {
    s.tau = required_number(*time, "tau", "time");
    if (!(s.tau > 0.0)) throw ConfigError("time.tau must be positive");
  }
  if (auto v = opt_number(*time, "end_time", "time")) cfg.run.end_time = *v;
  cfg.run.max_steps = static_cast<std::uint64_t>(std::max<std::int64_t>(0, integer(*time, "max_steps", "time", 0)));
  cfg.run.steady_tol = number(*time, "steady_tol", "time", 0.0);
  cfg.run.steady_window = static_cast<int>(integer(*time, "steady_window", "time", 100));
  if (!std::isfinite(cfg.run.end_time) && cfg.run.max_steps == 0 && cfg.run.steady_tol <= 0.0)
    throw ConfigError("[time] needs end_time, max_steps or steady_tol");
  if (cfg.run.steady_window < 1) throw ConfigError("time.steady_window must be >= 1");

  if (const auto* sor = section(root, "sor")) {
    check_keys(*sor, "[sor]", {"enabled", "omega", "eps", "u_ref", "A_ref", "sweeps_per_outer",
                               "max_outer", "order", "pressure_gradient"});
    s.cleaning = boolean(*sor, "enabled", "sor", true);
    s.reflect.pressure_gradient = boolean(*sor, "pressure_gradient", "sor", true);
    s.sor.omega = number(*sor, "omega", "sor", 1.5);
    if (auto eps = opt_number(*sor, "eps", "sor")) {
      s.sor.eps = *eps;
    } else {
      s.sor.eps = 1e-8 * number(*sor, "u_ref", "sor", 1.0) * number(*sor, "A_ref", "sor", 1.0) *
                  static_cast<double>(ncells);
    }
    s.sor.sweeps_per_outer = static_cast<int>(integer(*sor, "sweeps_per_outer", "sor", 1));
    s.sor.max_outer = static_cast<int>(integer(*sor, "max_outer", "sor", 2000));
    const auto order = opt_string(*sor, "order", "sor").value_or("lexicographic");
    if (order != "lexicographic" && order != "red_black")
      throw ConfigError("sor.order must be 'lexicographic' or 'red_black'");
    s.sor.red_black = order == "red_black";
    s.sor.validate();
  } else {
    s.sor.eps = 1e-8 * static_cast<double>(ncells);
  }

  if (const auto* out = section(root, "output")) {
    check_keys(*out, "[output]", {"directory", "period", "vtk", "checkpoint"});
    cfg.output.directory = opt_string(*out, "directory", "output").value_or(cfg.output.directory);
    cfg.output.period = static_cast<int>(integer(*out, "period", "output", cfg.output.period));
    cfg.output.vtk = boolean(*out, "vtk", "output", true);
    cfg.output.checkpoint = boolean(*out, "checkpoint", "output", true);
    if (cfg.output.period < 1) throw ConfigError("output.period must be >= 1");
  }

  if (const auto* les = section(root, "les")) {
    check_keys(*les, "[les]", {"period", "lambda"});
    s.les_period = static_cast<int>(integer(*les, "period", "les", 0));
    s.les_lambda = number(*les, "lambda", "les", 0.1);
    if (s.les_period < 0 || !(s.les_lambda >= 0.0 && s.les_lambda <= 1.0))
      throw ConfigError("[les] needs period >= 0 and 0 <= lambda <= 1");
  }

  // Every boundary patch of the final mesh needs a condition.
  for (const auto& name : build_topology(s.mesh).patch_names)
    if (!s.boundaries.count(name)) throw ConfigError("no boundary condition given for patch '" + name + "'");
  return cfg;
}

inline SimConfig parse_config_string(const std::string& text, const std::filesystem::path& base = ".") {
  try {
    return parse_config(toml::parse(text), base);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "case file: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open case file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str(), std::filesystem::path(path).parent_path());
}

}  // namespace dsc
