#pragma once

// Hand-rolled generators and oracles shared by the test binaries.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dsc/dsc.hpp"

namespace dsc::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::array<Point3, 8> unit_cube() {
  std::array<Point3, 8> v;
  for (int l = 0; l < 8; ++l) v[l] = {double(l & 1), double((l >> 1) & 1), double((l >> 2) & 1)};
  return v;
}

inline Mat3 random_matrix(Rng& rng, double spread) {
  Mat3 a = Mat3::identity();
  for (auto& row : a.m)
    for (auto& x : row) x += uniform(rng, -spread, spread);
  return a;
}

/// Random valid hexahedron: unit cube under a random affine map with
/// positive determinant, plus per-vertex jitter. Retries until the geometry
/// builds.
inline std::array<Point3, 8> random_hex(Rng& rng, double jitter = 0.15) {
  while (true) {
    const Mat3 a = random_matrix(rng, 0.4);
    if (a.det() < 0.3) continue;
    const double s = uniform(rng, 0.05, 20.0);
    const Vec3 t{uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -10, 10)};
    auto v = unit_cube();
    for (auto& p : v) {
      p = a * p;
      for (int k = 0; k < 3; ++k) p[k] += uniform(rng, -jitter, jitter);
      p = s * p + t;
    }
    try {
      build_cell_geometry(v);
      return v;
    } catch (const Error&) {
    }
  }
}

/// Parallelepiped with node vectors as columns of `b` and corner `origin`.
inline std::array<Point3, 8> parallelepiped(const Mat3& b, const Vec3& origin = {}) {
  auto v = unit_cube();
  for (auto& p : v) p = b * p + origin;
  return v;
}

inline HexMesh sheared_box(int n, const Mat3& shear) {
  auto m = gen_box(n, n, n);
  transform_vertices(m, shear);
  return m;
}

/// Box whose vertices are moved by a smooth random displacement field of
/// relative amplitude `amp`. Boundary vertices stay on their planes.
inline HexMesh smooth_random_box(int n, Rng& rng, double amp = 0.04) {
  auto m = gen_box(n, n, n);
  std::array<double, 9> ph;
  for (auto& x : ph) x = uniform(rng, 0, 2 * std::numbers::pi);
  const double pi = std::numbers::pi;
  for (auto& p : m.vertices) {
    const Vec3 q = p;
    const double bx = std::sin(pi * q.x), by = std::sin(pi * q.y), bz = std::sin(pi * q.z);
    p.x += amp * bx * std::sin(2 * pi * q.y + ph[0]) * std::cos(2 * pi * q.z + ph[1]);
    p.y += amp * by * std::sin(2 * pi * q.z + ph[2]) * std::cos(2 * pi * q.x + ph[3]);
    p.z += amp * bz * std::sin(2 * pi * q.x + ph[4]) * std::cos(2 * pi * q.y + ph[5]);
  }
  return m;
}

/// Box with every interior vertex jittered by up to `frac` of the spacing.
inline HexMesh jittered_box(int n, Rng& rng, double frac) {
  auto m = gen_box(n, n, n);
  const double h = 1.0 / n;
  for (auto& p : m.vertices)
    for (int k = 0; k < 3; ++k)
      if (p[k] > 1e-12 && p[k] < 1 - 1e-12) p[k] += uniform(rng, -frac, frac) * h;
  return m;
}

/// Samples Z at cell centers (nodes) and face centroids (ports, both history
/// levels) and builds channels from the ports.
inline void sample_field(const std::vector<CellGeometry>& geom, const MeshTopology& topo,
                         ScalarField& z, const std::function<double(const Point3&)>& fn) {
  for (CellId c = 0; c < geom.size(); ++c) {
    z.node[c] = fn(geom[c].center);
    for (int i = 0; i < kFacesPerCell; ++i) z.port[slot_of(c, i)] = fn(geom[c].face_centroids[i]);
  }
  z.node_prev = z.node;
  z.port_prev = z.port;
  gradops::update_channels(topo, z, z.port);
}

inline double max_abs(const Vec3& v) {
  return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

inline std::map<std::string, BoundaryCondition> uniform_walls(const HexMesh& m, BoundaryCondition bc = {}) {
  std::map<std::string, BoundaryCondition> out;
  for (const auto& name : build_topology(m).patch_names) out[name] = bc;
  return out;
}

}  // namespace dsc::testing
