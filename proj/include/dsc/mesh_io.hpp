#pragma once

// Plain-text mesh interchange:
//
//   dsc-mesh 1
//   vertices <N>
//   <x> <y> <z>                 (N lines)
//   cells <M>
//   <v0> ... <v7>               (M lines, canonical vertex order)
//   patches <K>
//   patch <name> <count>        (K blocks)
//   <cell> <face>               (count lines)
//
// Blank lines and lines starting with '#' are ignored.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dsc/errors.hpp"
#include "dsc/hexmesh.hpp"

namespace dsc {

inline void write_mesh(std::ostream& out, const HexMesh& mesh) {
  out << "dsc-mesh 1\n";
  out << "vertices " << mesh.vertices.size() << '\n';
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  out << "cells " << mesh.cells.size() << '\n';
  for (const auto& c : mesh.cells) {
    for (int k = 0; k < 8; ++k) out << (k ? " " : "") << c[k];
    out << '\n';
  }
  out << "patches " << mesh.patches.size() << '\n';
  for (const auto& p : mesh.patches) {
    out << "patch " << p.name << ' ' << p.faces.size() << '\n';
    for (const auto& f : p.faces) out << f.cell << ' ' << f.face << '\n';
  }
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return std::istringstream(line);
    }
    throw FormatError("mesh file ended while reading " + std::string(what));
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("mesh file line " + std::to_string(lineno_) + ": " + msg);
  }

  template <class T>
  T count(const char* keyword) {
    auto ss = next(keyword);
    std::string kw;
    T n{};
    if (!(ss >> kw >> n) || kw != keyword) fail(std::string("expected '") + keyword + " <count>'");
    return n;
  }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

}  // namespace detail

inline HexMesh read_mesh(std::istream& in) {
  detail::LineReader r(in);
  HexMesh mesh;
  {
    auto ss = r.next("header");
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "dsc-mesh") r.fail("missing 'dsc-mesh' header");
    if (version != 1) r.fail("unsupported mesh format version " + std::to_string(version));
  }
  const auto nv = r.count<std::size_t>("vertices");
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices) {
    auto ss = r.next("vertex");
    if (!(ss >> p.x >> p.y >> p.z)) r.fail("bad vertex line");
  }
  const auto nc = r.count<std::size_t>("cells");
  mesh.cells.resize(nc);
  for (auto& c : mesh.cells) {
    auto ss = r.next("cell");
    for (auto& v : c)
      if (!(ss >> v)) r.fail("cell line needs 8 vertex indices");
    for (auto v : c)
      if (v >= nv) r.fail("cell references vertex " + std::to_string(v) + " out of range");
  }
  const auto np = r.count<std::size_t>("patches");
  mesh.patches.resize(np);
  for (auto& p : mesh.patches) {
    auto ss = r.next("patch");
    std::string kw;
    std::size_t n = 0;
    if (!(ss >> kw >> p.name >> n) || kw != "patch") r.fail("expected 'patch <name> <count>'");
    p.faces.resize(n);
    for (auto& f : p.faces) {
      auto fs = r.next("patch face");
      if (!(fs >> f.cell >> f.face)) r.fail("bad patch face line");
      if (f.cell >= nc || f.face < 0 || f.face >= kFacesPerCell) r.fail("patch face out of range");
    }
  }
  return mesh;
}

inline void save_mesh(const std::string& path, const HexMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_mesh(out, mesh);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline HexMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

}  // namespace dsc
