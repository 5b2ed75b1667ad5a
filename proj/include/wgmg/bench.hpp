#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wgmg/mesh.hpp"
#include "wgmg/mg.hpp"
#include "wgmg/wg.hpp"

namespace wgmg {

/// A test problem: labeled coarse mesh plus coefficient, data and an optional
/// boundary snap. Reported level 1 is the coarse mesh refined
/// `base_refinements` times.
struct Domain {
  std::string name;
  SimplicialMesh coarse;
  int base_refinements = 0;
  DiffusionProblem problem;
  SnapHook snap;
};

struct DomainParams {
  /// Coefficient in the outer region of jump-cube.
  double eps = 1.0;
};

/// disk, osc-square, lshape, cube, jump-cube or mms (unit square, A = I).
Domain generate_domain(const std::string& name, const DomainParams& params = {});
const std::vector<std::string>& example_names();

/// Structured n x n triangulation of [x0, x1] x [y0, y1]; all boundary facets unlabeled.
SimplicialMesh structured_square(int n, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0);
/// n x n x n cubes on [lo, hi]^3, each split into the six Kuhn tetrahedra.
SimplicialMesh kuhn_cube(int n, double lo = -1.0, double hi = 1.0);

enum class SystemKind { Full, Reduced };
enum class ReportFormat { Csv, Json, Dat };

SystemKind parse_system(const std::string& s);
PreconditionerMode parse_mode(const std::string& s);
ReportFormat parse_format(const std::string& s);
std::string to_string(SystemKind s);
std::string to_string(PreconditionerMode m);

struct ExperimentConfig {
  std::string example = "disk";
  int levels = 3;
  SystemKind system = SystemKind::Full;
  PreconditionerConfig preconditioner;
  double eps = 1.0;
  double tol = 1e-8;
  int max_iterations = 2000;
  /// Compare a direct full solve with reduction + recovery on the first two levels.
  bool cross_check = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ReportRow {
  Index dof = 0;
  int steps = 0;
  double time = 0.0;
  double kappa = 0.0;
  int level = 0;
  std::string example;
  std::string system;
  std::string mode;
  double eps = 1.0;
  double tol = 1e-8;
  Index cells = 0;
  bool converged = false;
  /// Relative energy-norm gap between the full and reduced direct solutions; NaN when not computed.
  double cross_check_error = NAN;

  friend bool operator==(const ReportRow& a, const ReportRow& b);
};

/// One row per level. Throws with the level in the message on solver failure.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config);

/// Direct full solve vs. Schur solve plus interior recovery on one mesh:
/// ||u_full - u_reduced||_A / ||u_full||_A.
double full_reduced_gap(const SimplicialMesh& mesh, const DiffusionProblem& problem);

struct MmsConfig {
  int levels = 5;
  /// sine (sin(pi x) sin(pi y)) or linear (1 + 2x - 3y).
  std::string solution = "sine";
  /// identity or osc (2(2 + sin(10 pi x) sin(10 pi y))).
  std::string coefficient = "identity";
  SystemKind system = SystemKind::Full;
  double tol = 1e-12;
  /// Sparse direct solves instead of PCG.
  bool direct = false;
  /// Coarse 4 x 4 square refined this many times before level 1.
  int base_refinements = 1;
};

struct MmsRow {
  int level = 0;
  double h = 0.0;
  Index dof = 0;
  /// ||grad_w (Q_h u - u_h)||
  double energy_error = 0.0;
  /// ||Q_0 u - u_0||
  double l2_error = 0.0;
  /// log2 of the error ratio to the previous level; NaN on level 1.
  double energy_rate = NAN;
  double l2_rate = NAN;
  int steps = 0;
};

std::vector<MmsRow> mms_convergence(const MmsConfig& config);

std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format);
/// Throws on empty rows or an unwritable path.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);
std::vector<ReportRow> parse_json_report(const std::string& text);

std::string format_mms(const std::vector<MmsRow>& rows, ReportFormat format);

}  // namespace wgmg
