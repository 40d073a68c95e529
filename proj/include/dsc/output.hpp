#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/hexmesh.hpp"

namespace dsc {

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// VTK hexahedron corner order in terms of the canonical labels.
inline constexpr std::array<int, 8> kVtkHexOrder{0, 1, 3, 2, 4, 5, 7, 6};

/// Legacy ASCII unstructured grid with cell data T, p and u.
inline void write_vtk(std::ostream& out, const HexMesh& mesh, const FieldStore& fs,
                      const std::string& title = "dsc") {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& p : mesh.vertices)
    out << detail::fmt17(p.x) << ' ' << detail::fmt17(p.y) << ' ' << detail::fmt17(p.z) << '\n';
  const auto nc = mesh.num_cells();
  out << "CELLS " << nc << ' ' << nc * 9 << '\n';
  for (const auto& c : mesh.cells) {
    out << 8;
    for (int k : kVtkHexOrder) out << ' ' << c[k];
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t i = 0; i < nc; ++i) out << "12\n";
  out << "CELL_DATA " << nc << '\n';
  out << "SCALARS T double 1\nLOOKUP_TABLE default\n";
  for (double v : fs.T().node) out << detail::fmt17(v) << '\n';
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (double v : fs.p().node) out << detail::fmt17(v) << '\n';
  out << "VECTORS u double\n";
  for (CellId c = 0; c < nc; ++c) {
    const Vec3 u = fs.node_velocity(c);
    out << detail::fmt17(u.x) << ' ' << detail::fmt17(u.y) << ' ' << detail::fmt17(u.z) << '\n';
  }
}

inline void save_vtk(const std::string& path, const HexMesh& mesh, const FieldStore& fs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_vtk(out, mesh, fs);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline constexpr const char* kDiagnosticsHeader =
    "step,time,max_u,max_T,min_T,div_residual,sor_iters,thermal_content";

template <class Record>
void write_diagnostics_row(std::ostream& out, const Record& d) {
  out << d.step << ',' << detail::fmt17(d.time) << ',' << detail::fmt17(d.max_u) << ','
      << detail::fmt17(d.max_T) << ',' << detail::fmt17(d.min_T) << ','
      << detail::fmt17(d.div_residual) << ',' << d.sor_iters << ','
      << detail::fmt17(d.thermal_content) << '\n';
}

}  // namespace dsc
