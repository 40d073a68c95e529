#pragma once

// Discrete differential operators on the node/port representation.
//
// For face iota of a cell with normal direction n = [iota/2], the time-shifted
// differences along the node vectors are
//   normal:      2(-1)^iota (Z^n - Z^p_iota)
//   tangential:  the stored channel value (port differences one step back)
// and the face gradient is gamma applied to that vector. The face flux
// S = f . grad Z = s . nabla^B is written below as
//   S = w (Z^n - Z^p) + sum_{mu != n} s_mu chan_mu,   w = 2(-1)^iota s_n,
// which is the same quantity with the normal channel factored out.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/vec3.hpp"

namespace dsc::gradops {

/// Tangential part s_t . chan of the face flux.
inline double tangential_flux(const CellGeometry& g, const Channels& ch, int face) {
  const int n = normal_dir(face);
  double t = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    if (mu != n) t += g.s[face][mu] * ch[mu];
  return t;
}

inline Vec3 face_nabla_b(const ScalarField& z, CellId c, int face, double node_value) {
  const auto slot = slot_of(c, face);
  const int n = normal_dir(face);
  Vec3 r;
  for (int mu = 0; mu < 3; ++mu)
    r[mu] = (mu == n) ? 2.0 * face_sign(face) * (node_value - z.port[slot]) : z.chan[slot][mu];
  return r;
}

inline Vec3 face_nabla_b(const ScalarField& z, CellId c, int face) {
  return face_nabla_b(z, c, face, z.node[c]);
}

inline Vec3 face_gradient(const CellGeometry& g, const Vec3& nabla_b) { return g.gamma * nabla_b; }

inline double face_flux(const CellGeometry& g, const ScalarField& z, CellId c, int face,
                        double node_value) {
  const auto slot = slot_of(c, face);
  return g.normal_weight(face) * (node_value - z.port[slot]) +
         tangential_flux(g, z.chan[slot], face);
}

inline double face_flux(const CellGeometry& g, const ScalarField& z, CellId c, int face) {
  return face_flux(g, z, c, face, z.node[c]);
}

/// Differences of opposite ports along each node vector.
inline Vec3 nodal_nabla_b(std::span<const double> ports, CellId c) {
  Vec3 d;
  for (int mu = 0; mu < 3; ++mu)
    d[mu] = ports[slot_of(c, 2 * mu + 1)] - ports[slot_of(c, 2 * mu)];
  return d;
}

inline Vec3 nodal_gradient(const CellGeometry& g, const ScalarField& z, CellId c) {
  return g.gamma * nodal_nabla_b(z.port, c);
}

/// Tangential channels of one link from `ports`. At an interior link both
/// sides receive the arithmetic mean of their two values, mapped through the
/// shared edge orientation.
inline void update_link_channels(const FaceLink& link, ScalarField& z,
                                 std::span<const double> ports) {
  const auto sa = slot_of(link.a.cell, link.a.face);
  const Vec3 da = nodal_nabla_b(ports, link.a.cell);
  const int na = normal_dir(link.a.face);
  Channels ca{};
  if (!link.interior()) {
    for (int mu = 0; mu < 3; ++mu)
      if (mu != na) ca[mu] = da[mu];
    z.chan[sa] = ca;
    return;
  }
  const auto sb = slot_of(link.b.cell, link.b.face);
  const Vec3 db = nodal_nabla_b(ports, link.b.cell);
  Channels cb{};
  for (int mu = 0; mu < 3; ++mu) {
    if (mu == na) continue;
    const auto& m = link.a_to_b[mu];
    const double t = 0.5 * (da[mu] + m.sign * db[m.dir]);
    ca[mu] = t;
    cb[m.dir] = m.sign * t;
  }
  z.chan[sa] = ca;
  z.chan[sb] = cb;
}

/// Rebuilds the tangential channels of every face slot from `ports`.
inline void update_channels(const MeshTopology& topo, ScalarField& z, std::span<const double> ports) {
  for (const auto& link : topo.links) update_link_channels(link, z, ports);
}

inline void check_denominator(double d, double scale, const FaceLink& link) {
  if (!(std::abs(d) >= 1e-12 * scale))
    throw ZeroDenominator("interface between cells " + std::to_string(link.a.cell) + " and " +
                          std::to_string(link.b.cell) + " has a vanishing continuity denominator");
}

inline double s_row_norm(const CellGeometry& g, int face) {
  return std::sqrt(g.s[face][0] * g.s[face][0] + g.s[face][1] * g.s[face][1] +
                   g.s[face][2] * g.s[face][2]);
}

/// Shared port value at an interior link from continuity of Z and of the
/// normal flux (S_a = -S_b), given the current nodes and channels. Written
/// bit-identically to both sides. Returns the port value.
inline double connect_face(const FaceLink& link, const std::vector<CellGeometry>& geom,
                           ScalarField& z) {
  const auto& ga = geom[link.a.cell];
  const auto& gb = geom[link.b.cell];
  const auto sa = slot_of(link.a.cell, link.a.face);
  const auto sb = slot_of(link.b.cell, link.b.face);
  const double wa = ga.normal_weight(link.a.face);
  const double wb = gb.normal_weight(link.b.face);
  const double d = wa + wb;
  check_denominator(d, 2.0 * std::max(s_row_norm(ga, link.a.face), s_row_norm(gb, link.b.face)),
                    link);
  const double na = z.node[link.a.cell];
  const double nb = z.node[link.b.cell];
  const double t = tangential_flux(ga, z.chan[sa], link.a.face) +
                   tangential_flux(gb, z.chan[sb], link.b.face);
  const double p = na + (wb * (nb - na) + t) / d;
  z.port[sa] = p;
  z.port[sb] = p;
  return p;
}

/// Port value at a boundary face making the face flux vanish.
inline double zero_flux_port(const CellGeometry& g, const ScalarField& z, CellId c, int face) {
  const auto slot = slot_of(c, face);
  const double w = g.normal_weight(face);
  if (!(std::abs(w) >= 1e-12 * s_row_norm(g, face)) || w == 0.0)
    throw ZeroDiagonal("cell " + std::to_string(c) + " face " + std::to_string(face) +
                       " has a vanishing normal coefficient");
  return z.node[c] + tangential_flux(g, z.chan[slot], face) / w;
}

/// Connection of one field over all interior links. Channels are rebuilt from
/// `prev_ports` first; boundary ports are left to the boundary conditions.
inline void connect_field(const std::vector<CellGeometry>& geom, const MeshTopology& topo,
                          ScalarField& z, std::span<const double> prev_ports) {
  update_channels(topo, z, prev_ports);
  for (const auto& link : topo.links)
    if (link.interior()) connect_face(link, geom, z);
}

/// Face fluxes (S_a, S_b) of an interior link from the stored state.
inline std::pair<double, double> link_fluxes(const FaceLink& link,
                                             const std::vector<CellGeometry>& geom,
                                             const ScalarField& z) {
  return {face_flux(geom[link.a.cell], z, link.a.cell, link.a.face),
          face_flux(geom[link.b.cell], z, link.b.cell, link.b.face)};
}

/// Magnitude of the individual terms summed in S_a + S_b, for relative checks.
inline double link_flux_scale(const FaceLink& link, const std::vector<CellGeometry>& geom,
                              const ScalarField& z) {
  double acc = 0.0;
  for (const FaceRef side : {link.a, link.b}) {
    const auto& g = geom[side.cell];
    const auto slot = slot_of(side.cell, side.face);
    const double w = std::abs(g.normal_weight(side.face));
    acc += w * (std::abs(z.node[side.cell]) + std::abs(z.port[slot]));
    for (int mu = 0; mu < 3; ++mu)
      if (mu != normal_dir(side.face)) acc += std::abs(g.s[side.face][mu] * z.chan[slot][mu]);
  }
  return acc;
}

}  // namespace dsc::gradops
