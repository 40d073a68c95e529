#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dsc/checkpoint.hpp"
#include "dsc/config.hpp"
#include "dsc/errors.hpp"
#include "dsc/output.hpp"
#include "dsc/simulation.hpp"

namespace dsc {

struct RunOptions {
  int threads = 1;
  std::optional<std::string> restart;  // checkpoint to resume from
};

struct RunResult {
  std::uint64_t steps = 0;
  double time = 0.0;
  bool steady = false;
  Diagnostics last;
};

/// Relative change of T and u between two states, per step over `steps` steps.
inline double steady_change(const FieldStore& now, const FieldStore& then, double T_inf, int steps) {
  double dT = 0.0, Tscale = 0.0, du = 0.0, uscale = 0.0;
  for (CellId c = 0; c < now.num_cells(); ++c) {
    dT = std::max(dT, std::abs(now.T().node[c] - then.T().node[c]));
    Tscale = std::max(Tscale, std::abs(now.T().node[c] - T_inf));
    du = std::max(du, norm(now.node_velocity(c) - then.node_velocity(c)));
    uscale = std::max(uscale, norm(now.node_velocity(c)));
  }
  const double rel = std::max(dT / std::max(Tscale, 1e-12), du / std::max(uscale, kVelocityFloor));
  return rel / steps;
}

namespace detail {

inline std::string frame_name(std::uint64_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "fields_%08llu.vtk", static_cast<unsigned long long>(step));
  return buf;
}

}  // namespace detail

/// Runs a configured case, writing diagnostics.csv, VTK frames and a final
/// checkpoint into the output directory. Errors carry the failing step.
inline RunResult run_case(const SimConfig& cfg, const RunOptions& opt, std::ostream& log) {
  namespace fs = std::filesystem;
  SimSetup setup = cfg.setup;
  setup.threads = opt.threads;
  Simulation sim(std::move(setup));
  sim.initialize(cfg.initial.T, cfg.initial.u, cfg.initial.p);
  if (opt.restart) {
    auto ck = load_checkpoint(*opt.restart);
    if (ck.fields.num_cells() != sim.fields().num_cells())
      throw FormatError("checkpoint has " + std::to_string(ck.fields.num_cells()) +
                        " cells, the case mesh has " + std::to_string(sim.fields().num_cells()));
    sim.fields() = std::move(ck.fields);
    sim.time() = ck.time;
  }

  const fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw Error("cannot write " + (dir / "diagnostics.csv").string());
  csv << kDiagnosticsHeader << '\n';

  const auto& run = cfg.run;
  const double tau = sim.time().tau;
  auto done = [&] {
    if (run.max_steps && sim.time().step >= run.max_steps) return true;
    return sim.time().port_time() >= run.end_time - 0.5 * tau;
  };
  auto emit = [&] {
    write_diagnostics_row(csv, sim.diagnostics());
    if (cfg.output.vtk) save_vtk((dir / detail::frame_name(sim.time().step)).string(), sim.mesh(), sim.fields());
  };

  log << "cells " << sim.geometry().size() << ", tau " << tau << " s\n";
  RunResult res;
  FieldStore snapshot = sim.fields();
  bool emitted = false;
  while (!done()) {
    try {
      sim.step();
    } catch (const NoConvergence& e) {
      throw NoConvergence("step " + std::to_string(sim.time().step + 1) + ": " + e.what(), e.residual());
    } catch (const NonFiniteState& e) {
      throw NonFiniteState("step " + std::to_string(sim.time().step + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("step " + std::to_string(sim.time().step + 1) + ": " + e.what());
    }
    emitted = sim.time().step % static_cast<std::uint64_t>(cfg.output.period) == 0;
    if (emitted) emit();
    if (run.steady_tol > 0.0 && sim.time().step % static_cast<std::uint64_t>(run.steady_window) == 0) {
      const double ch = steady_change(sim.fields(), snapshot, sim.setup().fluid.T_inf, run.steady_window);
      snapshot = sim.fields();
      if (ch < run.steady_tol) {
        res.steady = true;
        log << "steady state at step " << sim.time().step << " (change " << ch << " per step)\n";
        break;
      }
    }
  }
  if (!emitted) emit();
  if (cfg.output.checkpoint) save_checkpoint((dir / "checkpoint.bin").string(), sim.fields(), sim.time());
  res.steps = sim.time().step;
  res.time = sim.time().port_time();
  res.last = sim.diagnostics();
  log << "finished at step " << res.steps << ", t = " << res.time << " s, max |u| = " << res.last.max_u
      << " m/s, T in [" << res.last.min_T << ", " << res.last.max_T << "] K\n";
  return res;
}

}  // namespace dsc
