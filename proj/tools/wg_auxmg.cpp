#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wgmg/bench.hpp"
#include "wgmg/mesh.hpp"

namespace {

using namespace wgmg;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

SimplicialMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open mesh file '" + path + "'");
  return read_mesh(is);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auxiliary-space multigrid for weak Galerkin discretizations"};
  app.require_subcommand(1);

  ExperimentConfig run;
  std::string system = "full", mode = "mul", format = "csv", out = "-", smoother = "sgs";
  auto* run_cmd = app.add_subcommand("run", "Solve an example on successive refinement levels");
  run_cmd->add_option("--example", run.example, "disk, osc-square, lshape, cube, jump-cube or mms")->required();
  run_cmd->add_option("--levels", run.levels, "Number of reported levels")->check(CLI::PositiveNumber);
  run_cmd->add_option("--system", system, "full or reduced");
  run_cmd->add_option("--mode", mode, "add or mul");
  run_cmd->add_option("--eps", run.eps, "Outer-region coefficient for jump-cube")->check(CLI::PositiveNumber);
  run_cmd->add_option("--tol", run.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-iterations", run.max_iterations, "PCG iteration limit");
  run_cmd->add_option("--smoother", smoother, "sgs or jacobi");
  run_cmd->add_option("--sweeps", run.preconditioner.sweeps, "Smoother sweeps in R");
  run_cmd->add_flag("--exact-aux", run.preconditioner.exact_aux_solve, "Direct auxiliary solve instead of a V-cycle");
  run_cmd->add_flag("!--no-cross-check", run.cross_check, "Skip the full/reduced direct-solve comparison");
  run_cmd->add_option("--out", out, "Output file, - for stdout");
  run_cmd->add_option("--format", format, "csv, json or dat");

  MmsConfig mms;
  std::string mms_system = "full", mms_format = "csv", mms_out = "-";
  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study on the unit square");
  mms_cmd->add_option("--levels", mms.levels, "Number of levels")->check(CLI::PositiveNumber);
  mms_cmd->add_option("--solution", mms.solution, "sine or linear");
  mms_cmd->add_option("--coefficient", mms.coefficient, "identity or osc");
  mms_cmd->add_option("--system", mms_system, "full or reduced");
  mms_cmd->add_option("--tol", mms.tol, "PCG tolerance")->check(CLI::PositiveNumber);
  mms_cmd->add_flag("--direct", mms.direct, "Sparse direct solves");
  mms_cmd->add_option("--out", mms_out, "Output file, - for stdout");
  mms_cmd->add_option("--format", mms_format, "csv, json or dat");

  auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
  mesh_cmd->require_subcommand(1);
  std::string mesh_in, mesh_out = "-", gen_example;
  int times = 1;
  auto* refine_cmd = mesh_cmd->add_subcommand("refine", "Uniformly refine a mesh file");
  refine_cmd->add_option("file", mesh_in, "Input mesh")->required();
  refine_cmd->add_option("--times", times, "Refinement count")->check(CLI::NonNegativeNumber);
  refine_cmd->add_option("--out", mesh_out, "Output file, - for stdout");
  auto* info_cmd = mesh_cmd->add_subcommand("info", "Print mesh statistics");
  info_cmd->add_option("file", mesh_in, "Input mesh")->required();
  auto* gen_cmd = mesh_cmd->add_subcommand("generate", "Write the coarse mesh of an example");
  gen_cmd->add_option("--example", gen_example, "Example name")->required();
  gen_cmd->add_option("--out", mesh_out, "Output file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) {
      run.system = parse_system(system);
      run.preconditioner.mode = parse_mode(mode);
      if (smoother == "jacobi") {
        run.preconditioner.smoother = SmootherKind::Jacobi;
      } else if (smoother != "sgs") {
        throw std::invalid_argument("unknown smoother '" + smoother + "' (expected sgs or jacobi)");
      }
      const ReportFormat fmt = parse_format(format);
      write_output(format_report(run_experiment(run), fmt), out);
    } else if (*mms_cmd) {
      mms.system = parse_system(mms_system);
      write_output(format_mms(mms_convergence(mms), parse_format(mms_format)), mms_out);
    } else if (*refine_cmd) {
      SimplicialMesh m = load_mesh(mesh_in);
      for (int k = 0; k < times; ++k) m = refine_uniform(m).mesh;
      std::ostringstream os;
      write_mesh(m, os);
      write_output(os.str(), mesh_out);
    } else if (*info_cmd) {
      const SimplicialMesh m = load_mesh(mesh_in);
      Index dirichlet = 0;
      for (const auto& l : m.facet_labels()) dirichlet += l.is_dirichlet() ? 1 : 0;
      std::cout << "dim " << m.dim() << "\n"
                << "vertices " << m.num_vertices() << "\n"
                << "cells " << m.num_cells() << "\n"
                << "facets " << m.num_facets() << "\n"
                << "boundary_facets " << m.num_boundary_facets() << "\n"
                << "dirichlet_facets " << dirichlet << "\n"
                << "labeled " << (m.fully_labeled() ? "yes" : "no") << "\n"
                << "volume " << m.total_volume() << "\n"
                << "max_shape_ratio " << m.max_shape_ratio() << "\n";
    } else if (*gen_cmd) {
      std::ostringstream os;
      write_mesh(generate_domain(gen_example).coarse, os);
      write_output(os.str(), mesh_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "wg-auxmg: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
