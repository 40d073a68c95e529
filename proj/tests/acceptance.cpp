// Acceptance checks AC1..AC10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "pressure_oracle.hpp"
#include "support.hpp"

using namespace dsc;
using dsc::testing::Rng;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- AC1

double closure_rel(const CellGeometry& g) {
  Vec3 s;
  double a = 0.0;
  for (const auto& f : g.f) {
    s += f;
    a += norm(f);
  }
  return norm(s) / a;
}

double gamma_identity_error(const CellGeometry& g) {
  const auto id = g.gamma.transposed() * Mat3::from_columns(g.b[0], g.b[1], g.b[2]);
  double e = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(id.m[i][j] - (i == j ? 1.0 : 0.0)));
  return e;
}

Outcome ac1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double closure = 0.0, gamma = 0.0;
  bool positive = true, outward = true;
  for (int k = 0; k < 1000; ++k) {
    const auto g = build_cell_geometry(dsc::testing::random_hex(rng));
    closure = std::max(closure, closure_rel(g));
    gamma = std::max(gamma, gamma_identity_error(g));
    positive = positive && g.volume > 0.0;
    for (int i = 0; i < 6; ++i) outward = outward && dot(g.f[i], g.face_centroids[i] - g.center) > 0.0;
  }
  const double elapsed = seconds_since(t0);

  const auto u = build_cell_geometry(dsc::testing::unit_cube());
  double cube = std::abs(u.volume - 1.0);
  for (int i = 0; i < 6; ++i) {
    cube = std::max(cube, std::abs(norm(u.f[i]) - 1.0));
    for (int mu = 0; mu < 3; ++mu) {
      const double s = mu == i / 2 ? (i % 2 ? 1.0 : -1.0) : 0.0;
      cube = std::max(cube, std::abs(u.s[i][mu] - s));
      cube = std::max(cube, std::abs(u.gamma.m[i / 2][mu] - (i / 2 == mu ? 1.0 : 0.0)));
    }
  }
  const bool pass = closure <= 1e-12 && gamma <= 1e-12 && positive && outward && cube <= 1e-15 &&
                    elapsed < 1.0;
  return {pass, fmt("closure %.2e, gamma %.2e, V>0 %s, outward %s, unit cube %.1e, %.3f s", closure,
                    gamma, positive ? "yes" : "no", outward ? "yes" : "no", cube, elapsed)};
}

// ---------------------------------------------------------------- AC2

Outcome ac2() {
  const auto t0 = Clock::now();
  const Mat3 shear{{{{{1.0, 0.35, 0.2}}, {{0.1, 1.0, 0.3}}, {{0.0, -0.25, 1.0}}}}};
  const auto mesh = dsc::testing::sheared_box(4, shear);
  const auto geom = build_geometry(mesh);
  const auto topo = build_topology(mesh);
  const Vec3 c{0.7, -1.3, 2.1};
  const double d = 4.0;
  auto exact = [&](const Point3& p) { return dot(c, p) + d; };

  FieldStore fs(mesh.num_cells());
  auto& T = fs.T();
  dsc::testing::sample_field(geom, topo, T, exact);

  FluidProperties props;
  props.alpha = 0.3;
  props.mu = 0.1;
  const double tau = stable_timestep(geom, props, 0.0);

  // One cycle: connection from the previous ports with exact boundary ports,
  // then reflection.
  fs.rotate_ports();
  gradops::connect_field(geom, topo, T, T.port_prev);
  for (const auto& l : topo.links)
    if (!l.interior()) T.port[slot_of(l.a.cell, l.a.face)] = exact(geom[l.a.cell].face_centroids[l.a.face]);
  std::vector<double> next(geom.size());
  for (CellId k = 0; k < geom.size(); ++k) next[k] = reflect_temperature(geom[k], fs, k, props, 0.0, tau);
  commit_nodes(fs, [&](FieldStore& f) { f.T().node = next; });

  double err = 0.0;
  for (CellId k = 0; k < geom.size(); ++k) {
    err = std::max(err, norm(gradops::nodal_gradient(geom[k], T, k) - c) / norm(c));
    for (int i = 0; i < 6; ++i)
      err = std::max(err, norm(gradops::face_gradient(geom[k], gradops::face_nabla_b(T, k, i)) - c) / norm(c));
  }
  const double elapsed = seconds_since(t0);
  return {err <= 1e-12 && elapsed < 1.0, fmt("max relative gradient error %.2e, %.3f s", err, elapsed)};
}

// ---------------------------------------------------------------- AC3

double face_flux_error(int n) {
  Rng rng(303);
  const auto mesh = dsc::testing::smooth_random_box(n, rng, 0.04);
  const auto geom = build_geometry(mesh);
  const auto topo = build_topology(mesh);
  const double pi = std::numbers::pi;
  auto z = [&](const Point3& p) { return std::sin(pi * p.x) * std::cos(0.5 * pi * p.y) * std::exp(p.z); };
  auto grad = [&](const Point3& p) {
    return Vec3{pi * std::cos(pi * p.x) * std::cos(0.5 * pi * p.y) * std::exp(p.z),
                -0.5 * pi * std::sin(pi * p.x) * std::sin(0.5 * pi * p.y) * std::exp(p.z),
                std::sin(pi * p.x) * std::cos(0.5 * pi * p.y) * std::exp(p.z)};
  };
  ScalarField f;
  f.resize(mesh.num_cells());
  dsc::testing::sample_field(geom, topo, f, z);
  double err = 0.0;
  for (const auto& l : topo.links) {
    if (!l.interior()) continue;
    for (const FaceRef side : {l.a, l.b}) {
      const auto& g = geom[side.cell];
      const Vec3& fv = g.f[side.face];
      const double exact = dot(fv, grad(g.face_centroids[side.face]));
      err = std::max(err, std::abs(gradops::face_flux(g, f, side.cell, side.face) - exact) / norm(fv));
    }
  }
  return err;
}

Outcome ac3() {
  const auto t0 = Clock::now();
  const double e1 = face_flux_error(8), e2 = face_flux_error(16), e3 = face_flux_error(32);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  const double elapsed = seconds_since(t0);
  return {std::min(p1, p2) >= 0.9 && elapsed < 10.0,
          fmt("errors %.3e %.3e %.3e, orders %.2f %.2f, %.2f s", e1, e2, e3, p1, p2, elapsed)};
}

// ---------------------------------------------------------------- shared runs

SimSetup convective_box(HexMesh mesh) {
  SimSetup s;
  s.boundaries = dsc::testing::uniform_walls(mesh);
  s.mesh = std::move(mesh);
  s.fluid.alpha = 2e-3;
  s.fluid.mu = 2e-3;
  s.fluid.rho_inf = 1.0;
  s.fluid.beta = 3e-3;
  s.fluid.T_inf = 300.0;
  s.tau = 2e-3;
  s.sor.eps = 1e-12;
  return s;
}

void heat_center(Simulation& sim) {
  sim.initialize(sim.setup().fluid.T_inf);
  const auto& g = sim.geometry();
  for (CellId c = 0; c < g.size(); ++c) {
    const auto d = g[c].center - Point3{0.5, 0.5, 0.5};
    sim.fields().T().node[c] += 5.0 * std::exp(-dot(d, d) / 0.05);
  }
  sim.initialize_from_nodes();
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
  Rng rng(404);
  Simulation sim(convective_box(dsc::testing::smooth_random_box(4, rng, 0.05)));
  heat_center(sim);
  ScatterRecorder rec(sim.geometry().size());
  double port_err = 0.0, node_err = 0.0;
  sim.after_ports = [&](const Simulation& s) {
    rec.record_ports(s.fields());
    port_err = std::max(port_err, rec.port_identity_error(s.fields()));
  };
  for (int k = 0; k < 50; ++k) {
    sim.step();
    rec.record_nodes(sim.fields());
    node_err = std::max(node_err, rec.node_identity_error(sim.fields()));
  }
  const bool moving = sim.diagnostics().max_u > 0.0;
  return {port_err <= 1e-14 && node_err <= 1e-14 && moving,
          fmt("port identity %.2e, node identity %.2e over 50 steps", port_err, node_err)};
}

// ---------------------------------------------------------------- AC5

double antisymmetry_over_run(Simulation& sim, int steps) {
  double worst = 0.0;
  sim.after_connection = [&](const Simulation& s) {
    for (int f = 0; f < 4; ++f) {
      const auto& z = s.fields().field(f);
      for (const auto& l : s.topology().links) {
        if (!l.interior()) continue;
        const auto [sa, sb] = gradops::link_fluxes(l, s.geometry(), z);
        const double scale = gradops::link_flux_scale(l, s.geometry(), z);
        if (scale > 0.0) worst = std::max(worst, std::abs(sa + sb) / scale);
      }
    }
  };
  for (int k = 0; k < steps; ++k) sim.step();
  return worst;
}

Outcome ac5() {
  Rng rng(505);
  Simulation box(convective_box(dsc::testing::smooth_random_box(4, rng, 0.06)));
  heat_center(box);
  const double e_box = antisymmetry_over_run(box, 50);

  auto mesh = gen_annulus(3, 16, 2, 0.05, 0.115, 0.02);
  SimSetup s;
  s.mesh = mesh;
  s.fluid.alpha = 2.2e-5;
  s.fluid.mu = 1.9e-5;
  s.fluid.rho_inf = 1.13;
  s.fluid.beta = 3.2e-3;
  s.fluid.g = {0, -9.81, 0};
  s.fluid.T_inf = 313.15;
  s.tau = 2e-3;
  s.sor.eps = 1e-12;
  BoundaryCondition cold{VelocityKind::NoSlip, ThermalKind::Isothermal, 313.15};
  BoundaryCondition end{VelocityKind::FreeSlip, ThermalKind::Adiabatic, 0.0};
  s.boundaries = {{"inner", {}}, {"outer", cold}, {"zmin", end}, {"zmax", end}};
  s.source.q.assign(mesh.num_cells(), 0.0);
  for (CellId c = 0; c < mesh.num_cells(); c += 3) s.source.q[c] = 2.0;
  Simulation ann(std::move(s));
  ann.initialize(313.15);
  const double e_ann = antisymmetry_over_run(ann, 50);
  const double e = std::max(e_box, e_ann);
  return {e <= 1e-12, fmt("max |S_a + S_b| / scale %.2e (box), %.2e (annulus)", e_box, e_ann)};
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
  Rng rng(606);
  SimSetup s;
  s.mesh = dsc::testing::smooth_random_box(5, rng, 0.05);
  s.boundaries = dsc::testing::uniform_walls(s.mesh);
  s.fluid.alpha = 1.0;
  s.fluid.mu = 1.0;
  s.fluid.rho_inf = 1.0;
  s.fluid.beta = 0.0;
  s.fluid.T_inf = 300.0;
  s.tau = stable_timestep(build_geometry(s.mesh), s.fluid, 0.0);
  Simulation sim(std::move(s));
  for (auto& t : sim.fields().T().node) t = dsc::testing::uniform(rng, 250.0, 350.0);
  sim.initialize_from_nodes();
  const double h0 = sim.diagnostics().thermal_content;
  for (int k = 0; k < 1000; ++k) sim.step();
  const auto d = sim.diagnostics();
  const double drift = std::abs(d.thermal_content - h0) / std::abs(h0);
  const double spread0 = 100.0, spread = d.max_T - d.min_T;
  return {drift < 1e-10 && d.max_u == 0.0,
          fmt("relative drift %.2e after 1000 cycles (T spread %.3g -> %.3g)", drift, spread0, spread)};
}

// ---------------------------------------------------------------- AC7

double slab_exact(double x, double t) {
  double v = x;
  for (int n = 1; n <= 200; ++n) {
    const double k = n * std::numbers::pi;
    v += 2.0 * (n % 2 ? -1.0 : 1.0) / k * std::sin(k * x) * std::exp(-k * k * t);
  }
  return v;
}

Outcome ac7() {
  const auto t0 = Clock::now();
  const auto cfg = load_config(std::string(DSC_CASES_DIR) + "/slab.toml");
  Simulation sim(cfg.setup);
  sim.initialize(cfg.initial.T);
  const double alpha = cfg.setup.fluid.alpha, L = 1.0;
  const double tau = sim.time().tau;
  const auto fourier_step = static_cast<std::uint64_t>(std::llround(0.1 * L * L / alpha / tau));

  double transient = 0.0, steady = 0.0;
  for (std::uint64_t k = 1; k <= cfg.run.max_steps; ++k) {
    sim.step();
    if (k == fourier_step) {
      // Nodes of step k sit at (k + 1/2) tau.
      const double t = alpha * sim.time().node_time() / (L * L);
      double err = 0.0, scale = 0.0;
      for (CellId c = 0; c < sim.geometry().size(); ++c) {
        const double ex = slab_exact(sim.geometry()[c].center.x / L, t);
        err = std::max(err, std::abs(sim.fields().T().node[c] - ex));
        scale = std::max(scale, std::abs(ex));
      }
      transient = err / scale;
    }
  }
  for (CellId c = 0; c < sim.geometry().size(); ++c)
    steady = std::max(steady, std::abs(sim.fields().T().node[c] - sim.geometry()[c].center.x / L));
  const double elapsed = seconds_since(t0);
  return {steady <= 0.01 && transient <= 0.02 && elapsed < 30.0,
          fmt("steady max error %.2e, Fo=0.1 relative error %.2e, %.2f s", steady, transient, elapsed)};
}

// ---------------------------------------------------------------- AC8

Outcome ac8() {
  const auto t0 = Clock::now();
  const int n = 8;
  const auto mesh = gen_box(n, n, n);
  const auto geom = build_geometry(mesh);
  const auto topo = build_topology(mesh);
  PressureSystem sys(geom, topo, std::vector<PressureBoundary>(topo.patch_names.size()));
  FieldStore fs(mesh.num_cells());
  Rng rng(808);
  const double u_ref = 1.0, A_ref = 1.0 / (n * n);
  for (const auto& l : topo.links) {
    if (!l.interior()) continue;
    const Vec3 u{dsc::testing::uniform(rng, -u_ref, u_ref), dsc::testing::uniform(rng, -u_ref, u_ref),
                 dsc::testing::uniform(rng, -u_ref, u_ref)};
    fs.set_port_velocity(slot_of(l.a.cell, l.a.face), u);
    fs.set_port_velocity(slot_of(l.b.cell, l.b.face), u);
  }
  std::vector<double> I;
  total_abs_integral(sys, fs, I);
  SorConfig cfg;
  cfg.omega = 1.5;
  cfg.eps = 1e-8 * u_ref * A_ref * static_cast<double>(mesh.num_cells());
  const double tau = 0.01, rho = 1.0;
  CleaningReport rep;
  bool converged = true;
  try {
    rep = clean_divergence(sys, fs, tau, rho, cfg);
  } catch (const NoConvergence&) {
    converged = false;
  }
  dsc::testing::PressureOracle oracle(geom, topo);
  const auto direct = oracle.solve(I, tau / rho);
  double diff = 0.0;
  for (std::size_t c = 0; c < geom.size(); ++c) diff = std::max(diff, std::abs(fs.p().node[c] - direct.node[c]));
  const double rel = diff / max_abs(direct.node);
  const double elapsed = seconds_since(t0);
  return {converged && rep.residual <= cfg.eps && rep.sweeps <= 500 && rel <= 1e-6 && elapsed < 30.0,
          fmt("sum|I| %.2e -> %.2e (eps %.2e) in %d sweeps, vs direct solve %.2e, %.2f s",
              rep.initial_residual, rep.residual, cfg.eps, rep.sweeps, rel, elapsed)};
}

// ---------------------------------------------------------------- AC9

Outcome ac9() {
  Rng rng(909);
  auto setup = convective_box(dsc::testing::smooth_random_box(3, rng, 0.05));
  Simulation rest(setup);
  rest.initialize(setup.fluid.T_inf);
  const FieldStore before = rest.fields();
  for (int k = 0; k < 100; ++k) rest.step();
  bool stationary = true;
  for (int f = 0; f < kNumFields; ++f)
    stationary = stationary && rest.fields().field(f).node == before.field(f).node &&
                 rest.fields().field(f).port == before.field(f).port;

  const double dT = 2.0;
  Simulation hot(setup);
  hot.initialize(setup.fluid.T_inf);
  const CellId c = 13;
  hot.fields().T().node[c] += dT;
  hot.initialize_from_nodes();
  hot.step();
  const double expect = setup.tau * setup.fluid.beta * dT * 9.81;
  const Vec3 u = hot.fields().node_velocity(c);
  const double err = norm(u - Vec3{0, 0, expect}) / expect;
  double others = 0.0;
  for (CellId k = 0; k < hot.geometry().size(); ++k)
    if (k != c) others = std::max(others, norm(hot.fields().node_velocity(k)));
  return {stationary && err <= 1e-12 && others == 0.0,
          fmt("rest state %s over 100 steps, first increment (%.3e, %.3e, %.6e) vs %.6e, rel %.1e",
              stationary ? "unchanged" : "CHANGED", u.x, u.y, u.z, expect, err)};
}

// ---------------------------------------------------------------- AC10

Outcome ac10() {
  const auto t0 = Clock::now();
  const auto cfg = load_config(std::string(DSC_CASES_DIR) + "/annulus.toml");
  Simulation sim(cfg.setup);
  sim.initialize(cfg.initial.T, cfg.initial.u, cfg.initial.p);
  const auto& geom = sim.geometry();
  const int window = cfg.run.steady_window;
  FieldStore snapshot = sim.fields();
  bool steady = false;
  while (sim.time().port_time() < cfg.run.end_time) {
    sim.step();
    if (sim.time().step % static_cast<std::uint64_t>(window) == 0) {
      const double ch = steady_change(sim.fields(), snapshot, cfg.setup.fluid.T_inf, window);
      snapshot = sim.fields();
      if (ch < cfg.run.steady_tol) {
        steady = true;
        break;
      }
    }
  }

  const double r_in = 0.05;
  double up = 0.0, vol = 0.0, peak = 0.0;
  for (CellId c = 0; c < geom.size(); ++c) {
    const auto& p = geom[c].center;
    peak = std::max(peak, norm(sim.fields().node_velocity(c)));
    if (p.y > 0.0 && std::abs(p.x) < r_in) {
      up += geom[c].volume * sim.fields().node_velocity(c).y;
      vol += geom[c].volume;
    }
  }
  up /= vol;

  double asym = 0.0;
  int unmatched = 0;
  for (CellId c = 0; c < geom.size(); ++c) {
    const auto& p = geom[c].center;
    bool found = false;
    for (CellId e = 0; e < geom.size() && !found; ++e) {
      const auto& q = geom[e].center;
      if (std::abs(q.x + p.x) < 1e-9 && std::abs(q.y - p.y) < 1e-9 && std::abs(q.z - p.z) < 1e-9) {
        found = true;
        asym = std::max(asym, std::abs(norm(sim.fields().node_velocity(c)) -
                                       norm(sim.fields().node_velocity(e))));
      }
    }
    unmatched += !found;
  }
  asym /= peak;
  const auto d = sim.diagnostics();
  const double elapsed = seconds_since(t0);
  const bool pass = steady && up > 0.0 && unmatched == 0 && asym <= 0.05 && peak >= 0.1 / 3.0 && peak <= 0.3;
  return {pass, fmt("%s at t = %.1f s, upper-gap mean u_y %.4f m/s, mirror asymmetry %.2e, peak |u| "
                    "%.4f m/s, T in [%.2f, %.2f] K, %.0f s",
                    steady ? "steady" : "NOT steady", sim.time().port_time(), up, asym, peak, d.min_T,
                    d.max_T, elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"AC1 geometry suite", ac1},          {"AC2 affine exactness", ac2},
      {"AC3 consistency order", ac3},       {"AC4 scattering identity", ac4},
      {"AC5 flux antisymmetry", ac5},       {"AC6 conservation", ac6},
      {"AC7 diffusion oracle", ac7},        {"AC8 divergence cleaning", ac8},
      {"AC9 buoyancy and fixed point", ac9}, {"AC10 convection demo", ac10},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
