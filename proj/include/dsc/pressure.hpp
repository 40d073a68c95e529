#pragma once

// Divergence cleaning. Each call solves for a pressure increment dp that
// removes the cell boundary integrals I = sum u^p . f left by the connection
// step:  (tau/rho) sum_faces S(dp) = I  per cell, with S the face flux of the
// reconstructed gradient. Face velocities are then corrected by
// -(tau/rho) grad dp and the increment is added to p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsc/boundary.hpp"
#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/gradops.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/parallel.hpp"

namespace dsc {

struct SorConfig {
  double omega = 1.5;
  double eps = 1e-8;          // stop tolerance on sum |I|, m^3/s
  int sweeps_per_outer = 1;   // SOR sweeps between velocity corrections
  int max_outer = 2000;
  bool red_black = false;     // colored sweep order, parallel within a color

  void validate() const {
    if (!(omega > 0.0 && omega < 2.0)) throw InvalidParameter("SOR omega must lie in (0, 2)");
    if (!(eps > 0.0)) throw InvalidParameter("SOR eps must be positive");
    if (sweeps_per_outer < 1 || max_outer < 1)
      throw InvalidParameter("SOR sweep counts must be >= 1");
  }
};

struct CleaningReport {
  int outer = 0;               // velocity corrections applied
  int sweeps = 0;              // SOR sweeps over all cells
  double initial_residual = 0.0;
  double residual = 0.0;       // sum |I| at exit
  std::vector<double> history; // sum |I| before each outer iteration and at exit
};

/// How a boundary patch enters the pressure problem.
struct PressureBoundary {
  VelocityKind velocity = VelocityKind::NoSlip;
  bool fixed_pressure = false;  // Dirichlet port (increment held at zero) instead of Neumann
};

/// Geometry, topology and boundary data of the cleaning problem, plus the
/// per-cell effective diagonal and an optional coloring.
class PressureSystem {
 public:
  PressureSystem(const std::vector<CellGeometry>& geom, const MeshTopology& topo,
                 std::vector<PressureBoundary> by_patch)
      : geom_(&geom), topo_(&topo), by_patch_(std::move(by_patch)) {
    for (const auto& link : topo.links)
      if (!link.interior() && static_cast<std::size_t>(link.patch) >= by_patch_.size())
        throw ConfigError("no pressure boundary for patch '" + topo.patch_names[link.patch] + "'");
    for (const auto& b : by_patch_) has_fixed_ = has_fixed_ || b.fixed_pressure;
    build_diagonal();
  }

  const std::vector<CellGeometry>& geom() const { return *geom_; }
  const MeshTopology& topo() const { return *topo_; }
  const PressureBoundary& boundary(const FaceLink& link) const { return by_patch_[link.patch]; }
  bool has_fixed() const { return has_fixed_; }

  /// d(sum_faces S)/d(node) with all ports refreshed, per cell.
  double diagonal(CellId c) const { return diag_[c]; }

  /// Greedy coloring of the face-adjacency graph, cells in id order within a color.
  const std::vector<std::vector<CellId>>& colors() const {
    if (colors_.empty()) build_colors();
    return colors_;
  }

 private:
  void build_diagonal() {
    const auto& geom = *geom_;
    const std::size_t n = geom.size();
    diag_.assign(n, 0.0);
    for (const auto& link : topo_->links) {
      const double wa = geom[link.a.cell].normal_weight(link.a.face);
      if (link.interior()) {
        const double wb = geom[link.b.cell].normal_weight(link.b.face);
        const double k = wa * wb / (wa + wb);
        diag_[link.a.cell] += k;
        diag_[link.b.cell] += k;
      } else if (boundary(link).fixed_pressure) {
        diag_[link.a.cell] += wa;
      }
    }
  }

  void build_colors() const {
    const std::size_t n = geom_->size();
    std::vector<int> color(n, -1);
    int ncolors = 0;
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<bool> used(static_cast<std::size_t>(ncolors) + 1, false);
      for (int f = 0; f < kFacesPerCell; ++f) {
        const auto nb = topo_->neighbor_slot[slot_of(static_cast<CellId>(c), f)];
        if (nb < 0) continue;
        const int k = color[static_cast<std::size_t>(nb) / kFacesPerCell];
        if (k >= 0) used[k] = true;
      }
      int k = 0;
      while (used[k]) ++k;
      color[c] = k;
      ncolors = std::max(ncolors, k + 1);
    }
    colors_.assign(ncolors, {});
    for (std::size_t c = 0; c < n; ++c) colors_[color[c]].push_back(static_cast<CellId>(c));
  }

  const std::vector<CellGeometry>* geom_;
  const MeshTopology* topo_;
  std::vector<PressureBoundary> by_patch_;
  bool has_fixed_ = false;
  std::vector<double> diag_;
  mutable std::vector<std::vector<CellId>> colors_;
};

/// sum_faces u^p . f, m^3/s.
inline double boundary_integral(const CellGeometry& g, const FieldStore& fs, CellId c) {
  double s = 0.0;
  for (int i = 0; i < kFacesPerCell; ++i) s += dot(fs.port_velocity(slot_of(c, i)), g.f[i]);
  return s;
}

/// Port value of one face of `p` consistent with the current nodes and channels.
inline void refresh_pressure_port(const PressureSystem& sys, CellId c, int face, ScalarField& p) {
  const auto& topo = sys.topo();
  const auto& link = topo.links[topo.slot_link[slot_of(c, face)]];
  if (link.interior()) {
    gradops::connect_face(link, sys.geom(), p);
  } else if (!sys.boundary(link).fixed_pressure) {
    apply_pressure_bc(sys.geom()[c], c, face, p);
  }
}

/// One relaxed update of the node of `c` against the cell balance
/// coef * sum_faces S(p) = I, followed by a refresh of the cell's ports.
/// coef is tau/rho. Returns the new nodal value.
inline double solve_cell_pressure(const PressureSystem& sys, CellId c, double I, ScalarField& p,
                                  double coef, double omega) {
  const auto& g = sys.geom()[c];
  double flux = 0.0;
  double wsum = 0.0;
  for (int i = 0; i < kFacesPerCell; ++i) {
    flux += gradops::face_flux(g, p, c, i);
    wsum += std::abs(g.normal_weight(i));
  }
  const double a = coef * sys.diagonal(c);
  if (!(std::abs(sys.diagonal(c)) > 1e-12 * wsum))
    throw ZeroDiagonal("pressure equation of cell " + std::to_string(c) +
                       " has a vanishing diagonal");
  p.node[c] += omega * (I - coef * flux) / a;
  for (int i = 0; i < kFacesPerCell; ++i) refresh_pressure_port(sys, c, i, p);
  return p.node[c];
}

/// Rebuilds channels from the current ports, then reconnects every interior
/// port and re-imposes the boundary pressure conditions.
inline void restore_pressure_continuity(const PressureSystem& sys, ScalarField& p,
                                        const Executor& ex = Executor{}) {
  const auto& links = sys.topo().links;
  ex.for_each(links.size(), [&](std::size_t i) { gradops::update_link_channels(links[i], p, p.port); });
  ex.for_each(links.size(), [&](std::size_t i) {
    const auto& link = links[i];
    if (link.interior())
      gradops::connect_face(link, sys.geom(), p);
    else if (!sys.boundary(link).fixed_pressure)
      apply_pressure_bc(sys.geom()[link.a.cell], link.a.cell, link.a.face, p);
  });
}

/// Face gradient of p at one face slot from the stored state.
inline Vec3 pressure_face_gradient(const CellGeometry& g, const ScalarField& p, CellId c, int face) {
  return gradops::face_gradient(g, gradops::face_nabla_b(p, c, face));
}

/// u^p = u_star - coef * grad p on one link. Interior links use the mean of the
/// two sides' face gradients; no-slip faces are untouched and free-slip faces
/// only receive the tangential part.
inline void correct_face_velocity(const PressureSystem& sys, const FaceLink& link, FieldStore& fs,
                                  const std::vector<Vec3>& u_star, const ScalarField& p,
                                  double coef) {
  const auto& geom = sys.geom();
  const auto sa = slot_of(link.a.cell, link.a.face);
  const Vec3 ga = pressure_face_gradient(geom[link.a.cell], p, link.a.cell, link.a.face);
  if (link.interior()) {
    const auto sb = slot_of(link.b.cell, link.b.face);
    const Vec3 gb = pressure_face_gradient(geom[link.b.cell], p, link.b.cell, link.b.face);
    const Vec3 u = u_star[sa] - (0.5 * coef) * (ga + gb);
    fs.set_port_velocity(sa, u);
    fs.set_port_velocity(sb, u);
    return;
  }
  switch (sys.boundary(link).velocity) {
    case VelocityKind::NoSlip:
      return;
    case VelocityKind::FreeSlip: {
      const Vec3 n = unit_normal(geom[link.a.cell], link.a.face);
      fs.set_port_velocity(sa, u_star[sa] - coef * project_tangential(ga, n));
      return;
    }
  }
}

inline double total_abs_integral(const PressureSystem& sys, const FieldStore& fs,
                                 std::vector<double>& I) {
  const auto& geom = sys.geom();
  I.resize(geom.size());
  double s = 0.0;
  for (CellId c = 0; c < geom.size(); ++c) {
    I[c] = boundary_integral(geom[c], fs, c);
    s += std::abs(I[c]);
  }
  return s;
}

/// Iterates SOR sweeps, continuity restoration and velocity correction until
/// sum |I| < eps, then adds the increment to p and fixes the gauge (volume
/// weighted mean zero) when no pressure is prescribed anywhere.
inline CleaningReport clean_divergence(const PressureSystem& sys, FieldStore& fs, double tau,
                                       double rho, const SorConfig& cfg,
                                       const Executor& ex = Executor{}) {
  cfg.validate();
  const auto& geom = sys.geom();
  const auto& topo = sys.topo();
  const std::size_t n = geom.size();
  const double coef = tau / rho;

  CleaningReport rep;
  std::vector<double> I;
  rep.initial_residual = rep.residual = total_abs_integral(sys, fs, I);
  rep.history.push_back(rep.residual);
  if (rep.residual < cfg.eps) return rep;

  const std::vector<double> I0 = I;
  std::vector<Vec3> u_star(n * kFacesPerCell);
  for (std::size_t s = 0; s < u_star.size(); ++s) u_star[s] = fs.port_velocity(s);

  ScalarField dp;
  dp.resize(n);

  while (true) {
    for (int k = 0; k < cfg.sweeps_per_outer; ++k) {
      if (cfg.red_black) {
        for (const auto& cells : sys.colors())
          ex.for_each(cells.size(), [&](std::size_t i) {
            solve_cell_pressure(sys, cells[i], I0[cells[i]], dp, coef, cfg.omega);
          });
      } else {
        for (CellId c = 0; c < n; ++c) solve_cell_pressure(sys, c, I0[c], dp, coef, cfg.omega);
      }
      ++rep.sweeps;
    }
    restore_pressure_continuity(sys, dp, ex);
    ex.for_each(topo.links.size(), [&](std::size_t i) {
      correct_face_velocity(sys, topo.links[i], fs, u_star, dp, coef);
    });
    ++rep.outer;
    rep.residual = total_abs_integral(sys, fs, I);
    rep.history.push_back(rep.residual);
    if (!std::isfinite(rep.residual)) throw NonFiniteState("non-finite residual in pressure cleaning");
    if (rep.residual < cfg.eps) break;
    if (rep.outer >= cfg.max_outer)
      throw NoConvergence("pressure cleaning did not reach tolerance after " +
                              std::to_string(rep.outer) + " iterations (residual " +
                              std::to_string(rep.residual) + ")",
                          rep.residual);
  }

  auto& p = fs.p();
  for (std::size_t c = 0; c < n; ++c) p.node[c] += dp.node[c];
  for (std::size_t s = 0; s < p.port.size(); ++s) {
    p.port[s] += dp.port[s];
    for (int mu = 0; mu < 3; ++mu) p.chan[s][mu] += dp.chan[s][mu];
  }
  if (!sys.has_fixed()) {
    double vsum = 0.0, psum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      vsum += geom[c].volume;
      psum += geom[c].volume * p.node[c];
    }
    const double mean = psum / vsum;
    for (auto& v : p.node) v -= mean;
    for (auto& v : p.port) v -= mean;
  }
  return rep;
}

}  // namespace dsc
