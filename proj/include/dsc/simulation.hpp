#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsc/boundary.hpp"
#include "dsc/boussinesq.hpp"
#include "dsc/cycle.hpp"
#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/gradops.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/parallel.hpp"
#include "dsc/pressure.hpp"

namespace dsc {

struct SimSetup {
  HexMesh mesh;
  FluidProperties fluid;
  HeatSource source;
  std::map<std::string, BoundaryCondition> boundaries;  // by patch name
  double tau = 0.0;
  SorConfig sor;
  bool cleaning = true;
  ReflectOptions reflect;
  int les_period = 0;  // 0 disables smoothing
  double les_lambda = 0.1;
  int threads = 1;
};

struct Diagnostics {
  std::uint64_t step = 0;
  double time = 0.0;
  double max_u = 0.0;
  double max_T = 0.0;
  double min_T = 0.0;
  double div_residual = 0.0;
  int sor_iters = 0;
  double thermal_content = 0.0;
};

class Simulation {
 public:
  explicit Simulation(SimSetup setup)
      : setup_(std::move(setup)),
        geom_(build_geometry(setup_.mesh)),
        topo_(build_topology(setup_.mesh)),
        ex_(setup_.threads),
        fs_(setup_.mesh.num_cells()) {
    setup_.fluid.validate();
    if (!(setup_.tau > 0.0)) throw InvalidParameter("time step must be positive");
    tg_.tau = setup_.tau;
    if (!setup_.source.q.empty() && setup_.source.q.size() != geom_.size())
      throw InvalidParameter("heat source table does not match the cell count");
    std::vector<PressureBoundary> pb;
    for (const auto& name : topo_.patch_names) {
      auto it = setup_.boundaries.find(name);
      if (it == setup_.boundaries.end())
        throw ConfigError("no boundary condition given for patch '" + name + "'");
      bcs_.by_patch.push_back(it->second);
      pb.push_back({it->second.velocity, false});
    }
    for (const auto& [name, bc] : setup_.boundaries)
      if (topo_.patch_id(name) < 0) throw ConfigError("boundary condition names unknown patch '" + name + "'");
    psys_.emplace(geom_, topo_, std::move(pb));
    scratch_T_.resize(geom_.size());
    scratch_u_.resize(geom_.size());
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Uniform initial state.
  void initialize(double T0, Vec3 u0 = {}, double p0 = 0.0) {
    std::fill(fs_.T().node.begin(), fs_.T().node.end(), T0);
    for (int k = 0; k < 3; ++k) std::fill(fs_.u(k).node.begin(), fs_.u(k).node.end(), u0[k]);
    std::fill(fs_.p().node.begin(), fs_.p().node.end(), p0);
    initialize_from_nodes();
  }

  /// Builds ports from the nodes already stored: neighbor means on interior
  /// faces, the node value on boundary faces, then channels and boundary
  /// conditions. Clears the history.
  void initialize_from_nodes() {
    for (int f = 0; f < kNumFields; ++f) {
      auto& z = fs_.field(f);
      for (const auto& link : topo_.links) {
        const auto sa = slot_of(link.a.cell, link.a.face);
        if (link.interior()) {
          const double v = 0.5 * (z.node[link.a.cell] + z.node[link.b.cell]);
          z.port[sa] = v;
          z.port[slot_of(link.b.cell, link.b.face)] = v;
        } else {
          z.port[sa] = z.node[link.a.cell];
        }
      }
      gradops::update_channels(topo_, z, z.port);
    }
    apply_boundary(geom_, topo_, bcs_, fs_);
    fs_.rotate_ports();
    fs_.rotate_nodes();
    tg_.step = 0;
  }

  void step() {
    CycleOps ops;
    ops.connection = [&] { connection(); };
    if (setup_.cleaning) ops.cleaning = [&] { last_cleaning_ = clean_divergence(*psys_, fs_, tg_.tau, setup_.fluid.rho_inf, setup_.sor, ex_); };
    ops.boundary = [&] { apply_boundary(geom_, topo_, bcs_, fs_); };
    if (setup_.les_period > 0 && (tg_.step + 1) % static_cast<std::uint64_t>(setup_.les_period) == 0)
      ops.smoothing = [&] { les_smooth(topo_, fs_, setup_.les_lambda); };
    ops.reflection = [&] { reflection(); };
    if (after_connection) ops.after_connection = [&] { after_connection(*this); };
    if (after_ports) ops.after_ports = [&] { after_ports(*this); };
    step_cycle(fs_, tg_, ops);
  }

  /// Port update of T and u: channels from the previous ports, shared ports
  /// on interior links, then the boundary conditions.
  void connection() {
    for (int f = 0; f < 4; ++f) {
      auto& z = fs_.field(f);
      ex_.for_each(topo_.links.size(), [&](std::size_t i) {
        gradops::update_link_channels(topo_.links[i], z, z.port_prev);
      });
      ex_.for_each(topo_.links.size(), [&](std::size_t i) {
        if (topo_.links[i].interior()) gradops::connect_face(topo_.links[i], geom_, z);
      });
    }
    apply_boundary(geom_, topo_, bcs_, fs_);
  }

  /// Node update of T and u from the current ports and nodes.
  void reflection() {
    const double tau = tg_.tau;
    ex_.for_each(geom_.size(), [&](std::size_t i) {
      const auto c = static_cast<CellId>(i);
      scratch_T_[c] = reflect_temperature(geom_[c], fs_, c, setup_.fluid, setup_.source.at(c), tau);
      scratch_u_[c] = reflect_velocity(geom_[c], fs_, c, setup_.fluid, tau, setup_.reflect);
    });
    commit_nodes(fs_, [&](FieldStore& fs) {
      fs.T().node = scratch_T_;
      for (std::size_t c = 0; c < scratch_u_.size(); ++c)
        for (int k = 0; k < 3; ++k) fs.u(k).node[c] = scratch_u_[c][k];
    });
  }

  Diagnostics diagnostics() const {
    Diagnostics d;
    d.step = tg_.step;
    d.time = tg_.port_time();
    d.max_T = -std::numeric_limits<double>::infinity();
    d.min_T = std::numeric_limits<double>::infinity();
    for (CellId c = 0; c < geom_.size(); ++c) {
      const double T = fs_.T().node[c];
      d.max_u = std::max(d.max_u, norm(fs_.node_velocity(c)));
      d.max_T = std::max(d.max_T, T);
      d.min_T = std::min(d.min_T, T);
      d.thermal_content += geom_[c].volume * T;
    }
    if (setup_.cleaning) {
      d.div_residual = last_cleaning_.residual;
      d.sor_iters = last_cleaning_.sweeps;
    } else {
      for (CellId c = 0; c < geom_.size(); ++c)
        d.div_residual += std::abs(boundary_integral(geom_[c], fs_, c));
    }
    return d;
  }

  const SimSetup& setup() const { return setup_; }
  const HexMesh& mesh() const { return setup_.mesh; }
  const std::vector<CellGeometry>& geometry() const { return geom_; }
  const MeshTopology& topology() const { return topo_; }
  const BoundarySet& boundaries() const { return bcs_; }
  const PressureSystem& pressure_system() const { return *psys_; }
  FieldStore& fields() { return fs_; }
  const FieldStore& fields() const { return fs_; }
  TimeGrid& time() { return tg_; }
  const TimeGrid& time() const { return tg_; }
  const CleaningReport& last_cleaning() const { return last_cleaning_; }
  void set_threads(int n) { ex_ = Executor(n); }

  std::function<void(const Simulation&)> after_connection;
  std::function<void(const Simulation&)> after_ports;

 private:
  SimSetup setup_;
  std::vector<CellGeometry> geom_;
  MeshTopology topo_;
  BoundarySet bcs_;
  std::optional<PressureSystem> psys_;
  Executor ex_;
  FieldStore fs_;
  TimeGrid tg_;
  CleaningReport last_cleaning_;
  std::vector<double> scratch_T_;
  std::vector<Vec3> scratch_u_;
};

}  // namespace dsc
