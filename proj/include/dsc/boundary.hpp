#pragma once

#include <string>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/gradops.hpp"
#include "dsc/hexmesh.hpp"

namespace dsc {

enum class VelocityKind { NoSlip, FreeSlip };
enum class ThermalKind { Isothermal, Adiabatic };

struct BoundaryCondition {
  VelocityKind velocity = VelocityKind::NoSlip;
  ThermalKind thermal = ThermalKind::Adiabatic;
  double wall_temperature = 0.0;  // K, isothermal only
};

inline Vec3 unit_normal(const CellGeometry& g, int face) { return (1.0 / norm(g.f[face])) * g.f[face]; }

/// Removes the component along the unit normal n.
inline Vec3 project_tangential(const Vec3& u, const Vec3& n) { return u - dot(u, n) * n; }

/// No-slip zeroes the port velocity; free-slip takes the tangential part of
/// the adjacent nodal velocity.
inline void apply_velocity_bc(const CellGeometry& g, CellId c, int face,
                              const BoundaryCondition& bc, FieldStore& fs) {
  const auto slot = slot_of(c, face);
  switch (bc.velocity) {
    case VelocityKind::NoSlip:
      fs.set_port_velocity(slot, {});
      break;
    case VelocityKind::FreeSlip:
      fs.set_port_velocity(slot, project_tangential(fs.node_velocity(c), unit_normal(g, face)));
      break;
  }
}

/// Isothermal fixes the port temperature; adiabatic picks the port value
/// whose conduction flux through the face vanishes.
inline void apply_thermal_bc(const CellGeometry& g, CellId c, int face,
                             const BoundaryCondition& bc, FieldStore& fs) {
  auto& T = fs.T();
  const auto slot = slot_of(c, face);
  switch (bc.thermal) {
    case ThermalKind::Isothermal:
      T.port[slot] = bc.wall_temperature;
      break;
    case ThermalKind::Adiabatic:
      T.port[slot] = gradops::zero_flux_port(g, T, c, face);
      break;
  }
}

/// Walls carry a homogeneous Neumann condition for pressure.
inline void apply_pressure_bc(const CellGeometry& g, CellId c, int face, ScalarField& p) {
  p.port[slot_of(c, face)] = gradops::zero_flux_port(g, p, c, face);
}

/// Boundary conditions indexed by topology patch id.
struct BoundarySet {
  std::vector<BoundaryCondition> by_patch;

  const BoundaryCondition& at(const MeshTopology& topo, int patch) const {
    if (patch < 0 || static_cast<std::size_t>(patch) >= by_patch.size())
      throw ConfigError("no boundary condition for patch '" +
                        (patch >= 0 && static_cast<std::size_t>(patch) < topo.patch_names.size()
                             ? topo.patch_names[patch]
                             : std::string("?")) +
                        "'");
    return by_patch[patch];
  }
};

/// Velocity and temperature conditions on every boundary face.
inline void apply_boundary(const std::vector<CellGeometry>& geom, const MeshTopology& topo,
                           const BoundarySet& bcs, FieldStore& fs) {
  for (const auto& link : topo.links) {
    if (link.interior()) continue;
    const auto& bc = bcs.at(topo, link.patch);
    const auto& g = geom[link.a.cell];
    apply_velocity_bc(g, link.a.cell, link.a.face, bc, fs);
    apply_thermal_bc(g, link.a.cell, link.a.face, bc, fs);
  }
}

}  // namespace dsc
