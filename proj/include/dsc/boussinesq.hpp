#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/gradops.hpp"
#include "dsc/hexmesh.hpp"

namespace dsc {

struct FluidProperties {
  double alpha = 0.0;    // thermal diffusivity, m^2/s
  double mu = 0.0;       // dynamic viscosity, Pa s
  double rho_inf = 1.0;  // reference density, kg/m^3
  double beta = 0.0;     // thermal expansion, 1/K
  Vec3 g{0.0, 0.0, -9.81};
  double T_inf = 0.0;    // reference temperature, K

  void validate() const {
    if (!(alpha >= 0.0 && mu >= 0.0 && rho_inf > 0.0) || !std::isfinite(beta) || !is_finite(g) ||
        !std::isfinite(T_inf) || !std::isfinite(alpha) || !std::isfinite(mu))
      throw InvalidParameter("fluid properties need alpha, mu >= 0, rho_inf > 0 and finite values");
  }
};

/// Heat source per cell, K/s.
struct HeatSource {
  std::vector<double> q;

  double at(CellId c) const { return q.empty() ? 0.0 : q[c]; }
};

struct ReflectOptions {
  bool pressure_gradient = true;  // include -grad p / rho in the momentum update
};

/// (1/V) sum over faces of u^p . f.
inline double nodal_divergence(const CellGeometry& g, const FieldStore& fs, CellId c) {
  double s = 0.0;
  for (int i = 0; i < kFacesPerCell; ++i) s += dot(fs.port_velocity(slot_of(c, i)), g.f[i]);
  return s / g.volume;
}

/// Outward volume fluxes u^p . f of the six faces.
inline std::array<double, 6> face_volume_fluxes(const CellGeometry& g, const FieldStore& fs,
                                                CellId c) {
  std::array<double, 6> m{};
  for (int i = 0; i < kFacesPerCell; ++i) m[i] = dot(fs.port_velocity(slot_of(c, i)), g.f[i]);
  return m;
}

/// Surface term sum_i (k S_i(Z) - Z^p_i m_i) of the transport equation for one field.
inline double transport_surface_sum(const CellGeometry& g, const ScalarField& z, CellId c,
                                    double k, const std::array<double, 6>& m) {
  double acc = 0.0;
  for (int i = 0; i < kFacesPerCell; ++i)
    acc += k * gradops::face_flux(g, z, c, i) - z.port[slot_of(c, i)] * m[i];
  return acc;
}

/// New nodal temperature from the current node and ports. Reads only the cell's
/// own data.
inline double reflect_temperature(const CellGeometry& g, const FieldStore& fs, CellId c,
                                  const FluidProperties& props, double q, double tau) {
  const auto m = face_volume_fluxes(g, fs, c);
  double msum = 0.0;
  for (double x : m) msum += x;
  const double T = fs.T().node[c];
  const double divu = msum / g.volume;
  return T + tau * (T * divu + q) +
         (tau / g.volume) * transport_surface_sum(g, fs.T(), c, props.alpha, m);
}

/// New nodal velocity from the current node and ports.
inline Vec3 reflect_velocity(const CellGeometry& g, const FieldStore& fs, CellId c,
                             const FluidProperties& props, double tau,
                             const ReflectOptions& opt = {}) {
  const auto m = face_volume_fluxes(g, fs, c);
  double msum = 0.0;
  for (double x : m) msum += x;
  const double divu = msum / g.volume;
  const double nu = props.mu / props.rho_inf;
  const double dT = fs.T().node[c] - props.T_inf;
  const Vec3 gp = opt.pressure_gradient ? gradops::nodal_gradient(g, fs.p(), c) : Vec3{};
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    const double u = fs.u(k).node[c];
    out[k] = u + tau * (u * divu - props.beta * dT * props.g[k] - gp[k] / props.rho_inf) +
             (tau / g.volume) * transport_surface_sum(g, fs.u(k), c, nu, m);
  }
  return out;
}

inline constexpr double kVelocityFloor = 1e-6;  // m/s

/// Explicit step limit from diffusion, viscosity and advection. A zero
/// diffusivity or viscosity drops that limit.
inline double stable_timestep(const std::vector<CellGeometry>& geom, const FluidProperties& props,
                              double umax, double safety = 0.5) {
  const double inf = std::numeric_limits<double>::infinity();
  double tau = inf;
  for (const auto& g : geom) {
    double fmax = 0.0;
    for (const auto& f : g.f) fmax = std::max(fmax, norm(f));
    const double h = g.volume / fmax;
    const double t_alpha = props.alpha > 0.0 ? h * h / (6.0 * props.alpha) : inf;
    const double t_mu = props.mu > 0.0 ? h * h * props.rho_inf / (6.0 * props.mu) : inf;
    const double t_adv = h / (std::abs(umax) + kVelocityFloor);
    tau = std::min({tau, t_alpha, t_mu, t_adv});
  }
  return safety * tau;
}

/// One pass of the nodal velocity filter u <- (1-lambda) u + lambda mean(neighbors).
/// Cells without face neighbors are left alone.
inline void les_smooth(const MeshTopology& topo, FieldStore& fs, double lambda) {
  const std::size_t n = fs.num_cells();
  std::array<std::vector<double>, 3> out;
  for (int k = 0; k < 3; ++k) out[k] = fs.u(k).node;
  for (std::size_t c = 0; c < n; ++c) {
    Vec3 sum;
    int cnt = 0;
    for (int f = 0; f < kFacesPerCell; ++f) {
      const auto nb = topo.neighbor_slot[slot_of(static_cast<CellId>(c), f)];
      if (nb < 0) continue;
      sum += fs.node_velocity(static_cast<CellId>(nb / kFacesPerCell));
      ++cnt;
    }
    if (cnt == 0) continue;
    const Vec3 mean = (1.0 / cnt) * sum;
    for (int k = 0; k < 3; ++k) out[k][c] = (1.0 - lambda) * fs.u(k).node[c] + lambda * mean[k];
  }
  for (int k = 0; k < 3; ++k) fs.u(k).node = std::move(out[k]);
}

}  // namespace dsc
