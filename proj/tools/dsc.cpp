// dsc: command-line driver.
//
//   dsc run <case.toml> [--restart checkpoint.bin] [--threads N]
//   dsc mesh gen box --cells NX NY NZ [--extent X Y Z] [--origin X Y Z] -o FILE
//   dsc mesh gen annulus --n-r N --n-theta N --n-z N --r-in R --r-out R --length L -o FILE
//   dsc mesh check FILE
//   dsc probe CHECKPOINT --cell ID
//
// Exit codes: 0 ok, 1 usage/config/mesh error, 2 runtime error, 3 pressure
// cleaning did not converge.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "dsc/dsc.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kNoConvergence = 3 };

int mesh_check(const std::string& path) {
  const auto mesh = dsc::load_mesh(path);
  const auto geom = dsc::build_geometry(mesh);
  const auto topo = dsc::build_topology(mesh);
  double closure = 0.0, gamma_err = 0.0, vmin = 1e300, vmax = 0.0, vsum = 0.0;
  for (const auto& g : geom) {
    dsc::Vec3 s;
    double fs = 0.0;
    for (const auto& f : g.f) {
      s += f;
      fs += dsc::norm(f);
    }
    closure = std::max(closure, dsc::norm(s) / fs);
    const auto beta = dsc::Mat3::from_columns(g.b[0], g.b[1], g.b[2]);
    const auto id = g.gamma.transposed() * beta;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gamma_err = std::max(gamma_err, std::abs(id.m[i][j] - (i == j)));
    vmin = std::min(vmin, g.volume);
    vmax = std::max(vmax, g.volume);
    vsum += g.volume;
  }
  std::printf("vertices        %zu\n", mesh.vertices.size());
  std::printf("cells           %zu\n", mesh.num_cells());
  std::printf("interior faces  %zu\n", topo.num_interior());
  std::printf("boundary faces  %zu\n", topo.num_boundary());
  std::printf("volume          total %.9g, min %.6g, max %.6g\n", vsum, vmin, vmax);
  std::printf("closure         max |sum f| / sum |f| = %.3e\n", closure);
  std::printf("gamma           max |gamma^T beta - I| = %.3e\n", gamma_err);
  for (std::size_t p = 0; p < topo.patch_names.size(); ++p) {
    std::size_t n = 0;
    for (const auto& l : topo.links) n += l.patch == static_cast<int>(p);
    std::printf("patch %-10s %zu faces\n", topo.patch_names[p].c_str(), n);
  }
  return kOk;
}

int probe(const std::string& path, std::uint64_t cell) {
  const auto ck = dsc::load_checkpoint(path);
  if (cell >= ck.fields.num_cells()) {
    std::cerr << "dsc: cell " << cell << " out of range (" << ck.fields.num_cells() << " cells)\n";
    return kConfig;
  }
  const auto c = static_cast<dsc::CellId>(cell);
  std::printf("step %llu, tau %.17g, node time %.17g\n", static_cast<unsigned long long>(ck.time.step),
              ck.time.tau, ck.time.node_time());
  std::printf("%-3s %24s   ports 0..5\n", "", "node");
  for (int f = 0; f < dsc::kNumFields; ++f) {
    const auto& z = ck.fields.field(f);
    std::printf("%-3s %24.17g  ", dsc::kFieldNames[f], z.node[c]);
    for (int i = 0; i < dsc::kFacesPerCell; ++i) std::printf(" %.10g", z.port[dsc::slot_of(c, i)]);
    std::printf("\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit node/port solver for Boussinesq convection on hexahedral meshes", "dsc"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run a case file");
  std::string case_path, restart;
  run->add_option("config", case_path, "Case file (TOML)")->required();
  run->add_option("--restart", restart, "Resume from a checkpoint");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* mesh = app.add_subcommand("mesh", "Mesh generation and checks");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("gen", "Generate a structured mesh");
  gen->require_subcommand(1);
  std::string out_path;
  auto* box = gen->add_subcommand("box", "Axis-aligned box");
  std::vector<int> cells{1, 1, 1};
  std::vector<double> extent{1, 1, 1}, origin{0, 0, 0};
  box->add_option("--cells", cells, "Cell counts NX NY NZ")->expected(3)->required();
  box->add_option("--extent", extent, "Box size in m")->expected(3);
  box->add_option("--origin", origin, "Lower corner in m")->expected(3);
  box->add_option("-o,--output", out_path, "Mesh file to write")->required();
  auto* ann = gen->add_subcommand("annulus", "Annulus around the z axis");
  int n_r = 4, n_theta = 16, n_z = 1;
  double r_in = 0.05, r_out = 0.115, length = 0.02;
  ann->add_option("--n-r", n_r, "Radial cells");
  ann->add_option("--n-theta", n_theta, "Azimuthal cells");
  ann->add_option("--n-z", n_z, "Axial cells");
  ann->add_option("--r-in", r_in, "Inner radius in m");
  ann->add_option("--r-out", r_out, "Outer radius in m");
  ann->add_option("--length", length, "Axial length in m");
  ann->add_option("-o,--output", out_path, "Mesh file to write")->required();
  auto* check = mesh->add_subcommand("check", "Validate a mesh file and print geometry statistics");
  std::string check_path;
  check->add_option("file", check_path, "Mesh file")->required();

  auto* pr = app.add_subcommand("probe", "Print one cell of a checkpoint");
  std::string ck_path;
  std::uint64_t cell = 0;
  pr->add_option("checkpoint", ck_path, "Checkpoint file")->required();
  pr->add_option("--cell", cell, "Cell id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      auto cfg = dsc::load_config(case_path);
      dsc::RunOptions opt;
      opt.threads = threads;
      if (!restart.empty()) opt.restart = restart;
      dsc::run_case(cfg, opt, std::cout);
      return kOk;
    }
    if (*box) {
      dsc::save_mesh(out_path, dsc::gen_box(cells[0], cells[1], cells[2], {extent[0], extent[1], extent[2]},
                                            {origin[0], origin[1], origin[2]}));
      return kOk;
    }
    if (*ann) {
      dsc::save_mesh(out_path, dsc::gen_annulus(n_r, n_theta, n_z, r_in, r_out, length));
      return kOk;
    }
    if (*check) return mesh_check(check_path);
    if (*pr) return probe(ck_path, cell);
  } catch (const dsc::NoConvergence& e) {
    std::cerr << "dsc: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const dsc::ConfigError& e) {
    std::cerr << "dsc: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::FormatError& e) {
    std::cerr << "dsc: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::OrientationError& e) {
    std::cerr << "dsc: mesh error: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::DegenerateCell& e) {
    std::cerr << "dsc: mesh error: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::SingularCell& e) {
    std::cerr << "dsc: mesh error: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::NonConformingMesh& e) {
    std::cerr << "dsc: mesh error: " << e.what() << '\n';
    return kConfig;
  } catch (const dsc::InvalidParameter& e) {
    std::cerr << "dsc: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "dsc: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
