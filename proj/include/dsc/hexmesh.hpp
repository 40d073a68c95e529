#pragma once

// Hexahedral cell geometry and mesh topology.
//
// Canonical vertex labeling: vertex (i,j,k) of the unit reference cube has
// local index i + 2j + 4k. Edges come in direction triples: edges 4*mu+nu
// (nu = 0..3) span reference direction mu, each pointing from the low to the
// high side. Face 2*mu lies on the low side of direction mu and face 2*mu+1 on
// the high side, which is the orientation the face-vector formula below
// produces with outward normals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/vec3.hpp"

namespace dsc {

using CellId = std::uint32_t;

inline constexpr int kFacesPerCell = 6;

/// Local (from, to) vertex pairs of the 12 edges.
inline constexpr std::array<std::array<int, 2>, 12> kEdgeVertices{{
    {0, 1}, {2, 3}, {6, 7}, {4, 5},   // direction 0
    {0, 2}, {4, 6}, {5, 7}, {1, 3},   // direction 1
    {0, 4}, {1, 5}, {3, 7}, {2, 6},   // direction 2
}};

/// Local vertices of each face.
inline constexpr std::array<std::array<int, 4>, 6> kFaceVertices{{
    {0, 2, 4, 6}, {1, 3, 5, 7},
    {0, 1, 4, 5}, {2, 3, 6, 7},
    {0, 1, 2, 3}, {4, 5, 6, 7},
}};

/// Reference direction normal to face iota, [iota/2].
constexpr int normal_dir(int face) { return face / 2; }
/// (-1)^iota.
constexpr double face_sign(int face) { return (face % 2 == 0) ? 1.0 : -1.0; }

using Edges = std::array<Vec3, 12>;
using NodeVectors = std::array<Vec3, 3>;
using FaceVectors = std::array<Vec3, 6>;
using SCoeffs = std::array<std::array<double, 3>, 6>;

inline Edges compute_edges(std::span<const Point3, 8> v) {
  Edges e;
  for (int n = 0; n < 12; ++n) e[n] = v[kEdgeVertices[n][1]] - v[kEdgeVertices[n][0]];
  return e;
}

inline NodeVectors compute_node_vectors(const Edges& e) {
  NodeVectors b;
  for (int mu = 0; mu < 3; ++mu)
    b[mu] = 0.25 * (e[4 * mu] + e[4 * mu + 1] + e[4 * mu + 2] + e[4 * mu + 3]);
  return b;
}

/// Face vectors from the edge vectors, indices cyclic modulo 12. Each is the
/// exact vector area of its (possibly non-planar) quadrilateral face.
inline FaceVectors compute_face_vectors(const Edges& e) {
  FaceVectors f;
  auto E = [&](int n) -> const Vec3& { return e[((n % 12) + 12) % 12]; };
  for (int i = 0; i < 6; ++i) {
    const int alt = (i % 2 == 0) ? 1 : -1;
    const Vec3 a = E(8 + 2 * i) + E(9 + 2 * (i + alt));
    const Vec3 c = E(4 + 2 * i) + E(5 + 2 * i);
    f[i] = (face_sign(i) / 4.0) * cross(a, c);
  }
  return f;
}

inline std::array<Point3, 6> compute_face_centroids(std::span<const Point3, 8> v) {
  std::array<Point3, 6> c;
  for (int i = 0; i < 6; ++i) {
    Vec3 s;
    for (int k : kFaceVertices[i]) s += v[k];
    c[i] = 0.25 * s;
  }
  return c;
}

inline Point3 compute_center(std::span<const Point3, 8> v) {
  Vec3 s;
  for (const auto& p : v) s += p;
  return 0.125 * s;
}

inline double max_edge_length(const Edges& e) {
  double h = 0.0;
  for (const auto& x : e) h = std::max(h, norm(x));
  return h;
}

/// Throws OrientationError unless every face vector points away from the cell center.
inline void check_outward(const FaceVectors& f, const std::array<Point3, 6>& centroids,
                          const Point3& center) {
  for (int i = 0; i < 6; ++i) {
    if (!(dot(f[i], centroids[i] - center) > 0.0))
      throw OrientationError("face " + std::to_string(i) +
                             " points inward; vertex labeling violates the canonical order");
  }
}

/// Relative volume below which a cell counts as degenerate, in units of
/// (max edge length)^3.
inline constexpr double kDegenerateVolumeRel = 1e-8;
/// Relative |det beta| below which gamma is not formed.
inline constexpr double kSingularDetRel = 1e-12;

/// Divergence theorem applied to the position field over the six faces.
inline double compute_volume(const FaceVectors& f, const std::array<Point3, 6>& centroids,
                             double scale) {
  double v = 0.0;
  for (int i = 0; i < 6; ++i) v += dot(centroids[i], f[i]);
  v /= 3.0;
  if (!(v > kDegenerateVolumeRel * scale * scale * scale))
    throw DegenerateCell("cell volume " + std::to_string(v) + " is not positive enough");
  return v;
}

/// gamma = (beta^T)^-1, beta having the node vectors as columns.
inline Mat3 compute_gamma(const NodeVectors& b, double scale) {
  const Mat3 beta = Mat3::from_columns(b[0], b[1], b[2]);
  const double d = beta.det();
  if (!(std::abs(d) >= kSingularDetRel * scale * scale * scale))
    throw SingularCell("node-vector matrix is singular (det = " + std::to_string(d) + ")");
  return beta.transposed().inverse();
}

/// s[iota][mu] = sum_nu f[iota][nu] * gamma[nu][mu].
inline SCoeffs compute_s_coeffs(const FaceVectors& f, const Mat3& gamma) {
  SCoeffs s{};
  for (int i = 0; i < 6; ++i)
    for (int mu = 0; mu < 3; ++mu) {
      double acc = 0.0;
      for (int nu = 0; nu < 3; ++nu) acc += f[i][nu] * gamma[nu][mu];
      s[i][mu] = acc;
    }
  return s;
}

struct CellGeometry {
  Edges edges;
  NodeVectors b;
  FaceVectors f;
  std::array<Point3, 6> face_centroids;
  Point3 center;
  double volume = 0.0;
  Mat3 gamma;
  SCoeffs s{};
  double scale = 0.0;  // longest edge

  /// Normal-channel weight 2(-1)^iota s[iota][[iota/2]]; negative for outward faces.
  double normal_weight(int face) const {
    return 2.0 * face_sign(face) * s[face][normal_dir(face)];
  }
};

inline CellGeometry build_cell_geometry(std::span<const Point3, 8> v) {
  for (const auto& p : v)
    if (!is_finite(p)) throw InvalidParameter("non-finite vertex coordinate");
  CellGeometry g;
  g.edges = compute_edges(v);
  g.scale = max_edge_length(g.edges);
  g.b = compute_node_vectors(g.edges);
  g.f = compute_face_vectors(g.edges);
  g.face_centroids = compute_face_centroids(v);
  g.center = compute_center(v);
  check_outward(g.f, g.face_centroids, g.center);
  g.volume = compute_volume(g.f, g.face_centroids, g.scale);
  g.gamma = compute_gamma(g.b, g.scale);
  g.s = compute_s_coeffs(g.f, g.gamma);
  return g;
}

// ---------------------------------------------------------------------------
// Mesh

struct FaceRef {
  CellId cell = 0;
  int face = 0;
  friend bool operator==(const FaceRef&, const FaceRef&) = default;
};

struct Patch {
  std::string name;
  std::vector<FaceRef> faces;
};

struct HexMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 8>> cells;
  std::vector<Patch> patches;  // explicit boundary tags

  std::size_t num_cells() const { return cells.size(); }

  std::array<Point3, 8> cell_vertices(CellId c) const {
    std::array<Point3, 8> out;
    for (int k = 0; k < 8; ++k) out[k] = vertices.at(cells[c][k]);
    return out;
  }
};

/// Cell geometry for every cell; errors carry the offending cell id.
inline std::vector<CellGeometry> build_geometry(const HexMesh& mesh) {
  std::vector<CellGeometry> out;
  out.reserve(mesh.num_cells());
  for (CellId c = 0; c < mesh.num_cells(); ++c) {
    const auto& ids = mesh.cells[c];
    for (int a = 0; a < 8; ++a) {
      if (ids[a] >= mesh.vertices.size())
        throw InvalidParameter("cell " + std::to_string(c) + " references missing vertex");
      for (int b = a + 1; b < 8; ++b)
        if (ids[a] == ids[b])
          throw DegenerateCell("cell " + std::to_string(c) + " repeats a vertex");
    }
    const auto v = mesh.cell_vertices(c);
    try {
      out.push_back(build_cell_geometry(v));
    } catch (const OrientationError& e) {
      throw OrientationError("cell " + std::to_string(c) + ": " + e.what());
    } catch (const DegenerateCell& e) {
      throw DegenerateCell("cell " + std::to_string(c) + ": " + e.what());
    } catch (const SingularCell& e) {
      throw SingularCell("cell " + std::to_string(c) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Topology

/// Where a tangential reference direction of one side lands on the other side.
struct TangentMap {
  int dir = 0;       // direction index in the partner cell
  double sign = 1.0; // +1 if both cells orient the shared edge alike
};

struct FaceLink {
  FaceRef a;
  FaceRef b;          // valid only when interior()
  int patch = -1;     // boundary patch id, -1 for interior links
  std::array<TangentMap, 3> a_to_b{};  // indexed by side-a direction

  bool interior() const { return patch < 0; }
};

struct MeshTopology {
  std::vector<FaceLink> links;
  std::vector<std::string> patch_names;
  /// Per face slot (cell*6 + face): owning link index.
  std::vector<std::uint32_t> slot_link;
  /// Per face slot: neighbor slot, or -1 on the boundary.
  std::vector<std::int64_t> neighbor_slot;

  std::size_t num_interior() const {
    return static_cast<std::size_t>(
        std::count_if(links.begin(), links.end(), [](const FaceLink& l) { return l.interior(); }));
  }
  std::size_t num_boundary() const { return links.size() - num_interior(); }

  int patch_id(const std::string& name) const {
    for (std::size_t i = 0; i < patch_names.size(); ++i)
      if (patch_names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline constexpr std::size_t slot_of(CellId c, int face) {
  return static_cast<std::size_t>(c) * kFacesPerCell + static_cast<std::size_t>(face);
}

namespace detail {

struct FaceKey {
  std::array<std::uint32_t, 4> v;
  friend bool operator==(const FaceKey&, const FaceKey&) = default;
};

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : k.v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

inline FaceKey face_key(const HexMesh& mesh, CellId c, int face) {
  FaceKey k;
  for (int i = 0; i < 4; ++i) k.v[i] = mesh.cells[c][kFaceVertices[face][i]];
  std::sort(k.v.begin(), k.v.end());
  return k;
}

/// Find the direction of `other` whose edges include the global edge (from,to).
inline TangentMap match_edge(const HexMesh& mesh, CellId other, std::uint32_t from,
                             std::uint32_t to) {
  for (int n = 0; n < 12; ++n) {
    const auto gf = mesh.cells[other][kEdgeVertices[n][0]];
    const auto gt = mesh.cells[other][kEdgeVertices[n][1]];
    if (gf == from && gt == to) return {n / 4, 1.0};
    if (gf == to && gt == from) return {n / 4, -1.0};
  }
  throw NonConformingMesh("shared face edges do not match between cells");
}

inline std::array<TangentMap, 3> tangent_maps(const HexMesh& mesh, FaceRef a, FaceRef b) {
  std::array<TangentMap, 3> maps{};
  const auto& fa = kFaceVertices[a.face];
  for (int mu = 0; mu < 3; ++mu) {
    if (mu == normal_dir(a.face)) {
      maps[mu] = {normal_dir(b.face), 1.0};
      continue;
    }
    for (int nu = 0; nu < 4; ++nu) {
      const auto& ev = kEdgeVertices[4 * mu + nu];
      const bool on_face = std::find(fa.begin(), fa.end(), ev[0]) != fa.end() &&
                           std::find(fa.begin(), fa.end(), ev[1]) != fa.end();
      if (!on_face) continue;
      maps[mu] = match_edge(mesh, b.cell, mesh.cells[a.cell][ev[0]], mesh.cells[a.cell][ev[1]]);
      break;
    }
  }
  return maps;
}

}  // namespace detail

/// Pairs faces sharing the same four vertex ids into interior links; the rest
/// become boundary links tagged by the mesh's explicit patches. Untagged
/// boundary faces land in a patch named "default".
inline MeshTopology build_topology(const HexMesh& mesh) {
  const std::size_t nslots = mesh.num_cells() * kFacesPerCell;
  MeshTopology topo;
  topo.slot_link.assign(nslots, std::numeric_limits<std::uint32_t>::max());
  topo.neighbor_slot.assign(nslots, -1);

  std::unordered_map<detail::FaceKey, FaceRef, detail::FaceKeyHash> open;
  open.reserve(nslots);
  for (CellId c = 0; c < mesh.num_cells(); ++c) {
    for (int f = 0; f < kFacesPerCell; ++f) {
      const auto key = detail::face_key(mesh, c, f);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, FaceRef{c, f});
        continue;
      }
      const FaceRef a = it->second;
      if (topo.slot_link[slot_of(a.cell, a.face)] != std::numeric_limits<std::uint32_t>::max())
        throw NonConformingMesh("face of cell " + std::to_string(c) +
                                " matches more than one partner");
      FaceLink link;
      link.a = a;
      link.b = {c, f};
      link.a_to_b = detail::tangent_maps(mesh, a, link.b);
      const auto id = static_cast<std::uint32_t>(topo.links.size());
      topo.links.push_back(link);
      topo.slot_link[slot_of(a.cell, a.face)] = id;
      topo.slot_link[slot_of(c, f)] = id;
      topo.neighbor_slot[slot_of(a.cell, a.face)] = static_cast<std::int64_t>(slot_of(c, f));
      topo.neighbor_slot[slot_of(c, f)] = static_cast<std::int64_t>(slot_of(a.cell, a.face));
    }
  }

  std::vector<int> tag(nslots, -1);
  for (std::size_t p = 0; p < mesh.patches.size(); ++p) {
    topo.patch_names.push_back(mesh.patches[p].name);
    for (const auto& fr : mesh.patches[p].faces) {
      if (fr.cell >= mesh.num_cells() || fr.face < 0 || fr.face >= kFacesPerCell)
        throw InvalidParameter("patch '" + mesh.patches[p].name + "' references a missing face");
      const auto s = slot_of(fr.cell, fr.face);
      if (topo.neighbor_slot[s] >= 0)
        throw NonConformingMesh("patch '" + mesh.patches[p].name + "' tags an interior face");
      if (tag[s] >= 0)
        throw NonConformingMesh("boundary face tagged by two patches");
      tag[s] = static_cast<int>(p);
    }
  }

  int default_patch = -1;
  for (CellId c = 0; c < mesh.num_cells(); ++c) {
    for (int f = 0; f < kFacesPerCell; ++f) {
      const auto s = slot_of(c, f);
      if (topo.neighbor_slot[s] >= 0) continue;
      int p = tag[s];
      if (p < 0) {
        if (default_patch < 0) {
          default_patch = static_cast<int>(topo.patch_names.size());
          topo.patch_names.emplace_back("default");
        }
        p = default_patch;
      }
      FaceLink link;
      link.a = {c, f};
      link.patch = p;
      topo.slot_link[s] = static_cast<std::uint32_t>(topo.links.size());
      topo.links.push_back(link);
    }
  }
  return topo;
}

// ---------------------------------------------------------------------------
// Generators

/// Structured nx*ny*nz box [origin, origin+extent], patches xmin..zmax.
inline HexMesh gen_box(int nx, int ny, int nz, Vec3 extent = {1.0, 1.0, 1.0},
                       Vec3 origin = {}) {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidParameter("box cell counts must be >= 1");
  if (!(extent.x > 0.0 && extent.y > 0.0 && extent.z > 0.0))
    throw InvalidParameter("box extents must be positive");
  HexMesh m;
  auto vid = [&](int i, int j, int k) {
    return static_cast<std::uint32_t>(i + (nx + 1) * (j + (ny + 1) * k));
  };
  m.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.vertices.push_back({origin.x + extent.x * i / nx, origin.y + extent.y * j / ny,
                              origin.z + extent.z * k / nz});
  m.patches = {{"xmin", {}}, {"xmax", {}}, {"ymin", {}},
               {"ymax", {}}, {"zmin", {}}, {"zmax", {}}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::array<std::uint32_t, 8> c;
        for (int l = 0; l < 8; ++l) c[l] = vid(i + (l & 1), j + ((l >> 1) & 1), k + ((l >> 2) & 1));
        const auto id = static_cast<CellId>(m.cells.size());
        m.cells.push_back(c);
        if (i == 0) m.patches[0].faces.push_back({id, 0});
        if (i == nx - 1) m.patches[1].faces.push_back({id, 1});
        if (j == 0) m.patches[2].faces.push_back({id, 2});
        if (j == ny - 1) m.patches[3].faces.push_back({id, 3});
        if (k == 0) m.patches[4].faces.push_back({id, 4});
        if (k == nz - 1) m.patches[5].faces.push_back({id, 5});
      }
  return m;
}

/// Annular sector mesh around the z axis: reference direction 0 radial,
/// 1 azimuthal, 2 axial. Azimuthal cell boundaries start at -pi/2, so the mesh
/// is mirror symmetric about the x = 0 plane. Patches inner, outer, zmin, zmax.
inline HexMesh gen_annulus(int n_r, int n_theta, int n_z, double r_in, double r_out,
                           double length) {
  if (n_r < 1 || n_z < 1) throw InvalidParameter("annulus cell counts must be >= 1");
  if (n_theta < 3) throw InvalidParameter("annulus needs at least 3 azimuthal cells");
  if (!(r_in > 0.0 && r_in < r_out)) throw InvalidParameter("annulus needs 0 < r_in < r_out");
  if (!(length > 0.0)) throw InvalidParameter("annulus length must be positive");
  HexMesh m;
  auto vid = [&](int i, int j, int k) {
    return static_cast<std::uint32_t>(i + (n_r + 1) * ((j % n_theta) + n_theta * k));
  };
  for (int k = 0; k <= n_z; ++k)
    for (int j = 0; j < n_theta; ++j)
      for (int i = 0; i <= n_r; ++i) {
        const double r = r_in + (r_out - r_in) * i / n_r;
        const double th = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * j / n_theta;
        m.vertices.push_back({r * std::cos(th), r * std::sin(th), length * k / n_z});
      }
  m.patches = {{"inner", {}}, {"outer", {}}, {"zmin", {}}, {"zmax", {}}};
  for (int k = 0; k < n_z; ++k)
    for (int j = 0; j < n_theta; ++j)
      for (int i = 0; i < n_r; ++i) {
        std::array<std::uint32_t, 8> c;
        for (int l = 0; l < 8; ++l) c[l] = vid(i + (l & 1), j + ((l >> 1) & 1), k + ((l >> 2) & 1));
        const auto id = static_cast<CellId>(m.cells.size());
        m.cells.push_back(c);
        if (i == 0) m.patches[0].faces.push_back({id, 0});
        if (i == n_r - 1) m.patches[1].faces.push_back({id, 1});
        if (k == 0) m.patches[2].faces.push_back({id, 4});
        if (k == n_z - 1) m.patches[3].faces.push_back({id, 5});
      }
  return m;
}

/// Applies x -> A x + t to every vertex.
inline void transform_vertices(HexMesh& mesh, const Mat3& a, const Vec3& t = {}) {
  for (auto& p : mesh.vertices) p = a * p + t;
}

}  // namespace dsc
