#include "wgmg/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wgmg/reduction.hpp"
#include "wgmg/solver.hpp"
#include "wgmg/transfer.hpp"

namespace wgmg {
namespace {

constexpr double pi = std::numbers::pi;

void orient(const std::vector<Point>& v, Cell& c, int dim) {
  std::array<Point, 4> p;
  for (int i = 0; i <= dim; ++i) p[i] = v[c[i]];
  if (signed_volume(dim, std::span<const Point>(p.data(), dim + 1)) < 0.0) std::swap(c[0], c[1]);
}

SimplicialMesh label_all(SimplicialMesh mesh, const BoundaryMarker& marker) {
  mesh.set_facet_labels(classify_boundary(mesh, marker));
  return mesh;
}

const BoundaryMarker all_dirichlet = [](const Point&) { return FacetLabel::dirichlet(0); };

SimplicialMesh disk_fan() {
  std::vector<Point> v{{0.0, 0.0, 0.0}};
  for (int k = 0; k < 8; ++k) v.push_back({std::cos(k * pi / 4), std::sin(k * pi / 4), 0.0});
  std::vector<Cell> c;
  for (Index k = 1; k <= 8; ++k) c.push_back({0, k, k % 8 + 1, -1});
  return SimplicialMesh(2, std::move(v), std::move(c));
}

SimplicialMesh lshape() {
  // Three unit squares of (-1,1)^2 without [0,1]x[-1,0].
  std::vector<Point> v;
  for (double y : {-1.0, 0.0, 1.0})
    for (double x : {-1.0, 0.0, 1.0}) v.push_back({x, y, 0.0});
  auto id = [](int i, int j) { return static_cast<Index>(j * 3 + i); };
  std::vector<Cell> c;
  for (auto [i, j] : std::array<std::pair<int, int>, 3>{{{0, 0}, {0, 1}, {1, 1}}}) {
    c.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
    c.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
  }
  // Drop the unused corner (1,-1) and renumber.
  v.erase(v.begin() + 2);
  for (Cell& cell : c)
    for (int i = 0; i < 3; ++i)
      if (cell[i] > 2) --cell[i];
  return SimplicialMesh(2, std::move(v), std::move(c));
}

double osc(const Point& x) { return 2.0 * (2.0 + std::sin(10 * pi * x[0]) * std::sin(10 * pi * x[1])); }

CoefficientField osc_coefficient() { return CoefficientField::smooth(osc, std::pair{2.0, 6.0}); }

}  // namespace

SimplicialMesh structured_square(int n, double x0, double x1, double y0, double y1) {
  if (n < 1) throw std::invalid_argument("structured_square: n must be positive");
  std::vector<Point> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.push_back({x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n, 0.0});
  auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  std::vector<Cell> c;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      c.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      c.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  }
  return SimplicialMesh(2, std::move(v), std::move(c));
}

SimplicialMesh kuhn_cube(int n, double lo, double hi) {
  if (n < 1) throw std::invalid_argument("kuhn_cube: n must be positive");
  const double h = (hi - lo) / n;
  std::vector<Point> v;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) v.push_back({lo + h * i, lo + h * j, lo + h * k});
  auto id = [n](int i, int j, int k) { return static_cast<Index>((k * (n + 1) + j) * (n + 1) + i); };
  std::vector<Cell> c;
  std::array<int, 3> perm{0, 1, 2};
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        std::sort(perm.begin(), perm.end());
        do {
          std::array<int, 3> at{i, j, k};
          Cell cell{};
          cell[0] = id(at[0], at[1], at[2]);
          for (int s = 0; s < 3; ++s) {
            ++at[perm[s]];
            cell[s + 1] = id(at[0], at[1], at[2]);
          }
          orient(v, cell, 3);
          c.push_back(cell);
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  return SimplicialMesh(3, std::move(v), std::move(c));
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"disk", "osc-square", "lshape", "cube", "jump-cube", "mms"};
  return names;
}

Domain generate_domain(const std::string& name, const DomainParams& params) {
  if (!(params.eps > 0.0)) throw std::invalid_argument("generate_domain: eps must be positive");
  Domain d;
  d.name = name;
  d.problem.source = [](const Point&) { return 1.0; };
  if (name == "disk") {
    d.coarse = label_all(disk_fan(), all_dirichlet);
    d.base_refinements = 4;
    d.snap = [](Point& x) {
      const double r = std::hypot(x[0], x[1]);
      x[0] /= r;
      x[1] /= r;
    };
  } else if (name == "osc-square") {
    d.coarse = label_all(structured_square(4), all_dirichlet);
    d.base_refinements = 2;
    d.problem.coefficient = osc_coefficient();
  } else if (name == "lshape") {
    d.coarse = label_all(lshape(), all_dirichlet);
    d.base_refinements = 3;
  } else if (name == "cube") {
    d.coarse = label_all(kuhn_cube(1), all_dirichlet);
    d.base_refinements = 2;
  } else if (name == "jump-cube") {
    SimplicialMesh grid = kuhn_cube(4);
    std::vector<int> regions(static_cast<std::size_t>(grid.num_cells()), 0);
    auto inside = [](const Point& x, double lo, double hi) {
      return x[0] > lo && x[0] < hi && x[1] > lo && x[1] < hi && x[2] > lo && x[2] < hi;
    };
    for (Index c = 0; c < grid.num_cells(); ++c) {
      const Point x = grid.cell_centroid(c);
      regions[c] = inside(x, -0.5, 0.0) ? 1 : inside(x, 0.0, 0.5) ? 2 : 0;
    }
    SimplicialMesh mesh(3, grid.vertices(), grid.cells(), std::move(regions));
    d.coarse = label_all(std::move(mesh), [](const Point& x) {
      if (std::abs(x[0] + 1.0) < 1e-12) return FacetLabel::dirichlet(0);
      if (std::abs(x[0] - 1.0) < 1e-12) return FacetLabel::dirichlet(1);
      return FacetLabel::neumann(0);
    });
    d.problem.coefficient = CoefficientField::per_region({params.eps, 1.0, 1.0});
    d.problem.dirichlet = [](const Point&, int tag) { return tag == 1 ? 1.0 : 0.0; };
  } else if (name == "mms") {
    d.coarse = label_all(structured_square(4), all_dirichlet);
    d.base_refinements = 1;
    d.problem.source = [](const Point& x) {
      return 2 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
    };
  } else {
    throw std::invalid_argument("generate_domain: unknown example '" + name + "'");
  }
  return d;
}

SystemKind parse_system(const std::string& s) {
  if (s == "full") return SystemKind::Full;
  if (s == "reduced") return SystemKind::Reduced;
  throw std::invalid_argument("unknown system '" + s + "' (expected full or reduced)");
}

PreconditionerMode parse_mode(const std::string& s) {
  if (s == "add") return PreconditionerMode::Additive;
  if (s == "mul") return PreconditionerMode::Multiplicative;
  throw std::invalid_argument("unknown mode '" + s + "' (expected add or mul)");
}

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "dat") return ReportFormat::Dat;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv, json or dat)");
}

std::string to_string(SystemKind s) { return s == SystemKind::Full ? "full" : "reduced"; }
std::string to_string(PreconditionerMode m) { return m == PreconditionerMode::Additive ? "add" : "mul"; }

void ExperimentConfig::validate() const {
  if (levels < 1) throw std::invalid_argument("ExperimentConfig: levels must be at least 1");
  if (!(eps > 0.0)) throw std::invalid_argument("ExperimentConfig: eps must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("ExperimentConfig: tol must be positive");
  preconditioner.validate();
}

bool operator==(const ReportRow& a, const ReportRow& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.dof == b.dof && a.steps == b.steps && same(a.time, b.time) && same(a.kappa, b.kappa) &&
         a.level == b.level && a.example == b.example && a.system == b.system && a.mode == b.mode &&
         same(a.eps, b.eps) && same(a.tol, b.tol) && a.cells == b.cells && a.converged == b.converged &&
         same(a.cross_check_error, b.cross_check_error);
}

namespace {

double energy_gap(const WgSystem& sys) {
  const std::vector<double> full = direct_solve(sys.matrix, sys.rhs);
  const BlockSystem blocks = split_blocks(sys);
  const SchurSystem schur = schur_complement(blocks);
  const std::vector<double> ub = direct_solve(schur.S, schur.g);
  const std::vector<double> reduced = concatenate(ub, recover_interior(ub, blocks));
  std::vector<double> e(full.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = full[i] - reduced[i];
  const double err = std::sqrt(std::max(dot(e, sys.matrix.multiply(e)), 0.0));
  const double ref = std::sqrt(std::max(dot(full, sys.matrix.multiply(full)), 0.0));
  return ref > 0.0 ? err / ref : err;
}

}  // namespace

double full_reduced_gap(const SimplicialMesh& mesh, const DiffusionProblem& problem) {
  return energy_gap(assemble(mesh, problem));
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Domain dom = generate_domain(config.example, {config.eps});
  const int base = dom.base_refinements;
  const MeshHierarchy meshes = build_hierarchy(dom.coarse, base + config.levels, dom.snap);
  std::vector<ReportRow> rows;
  for (int level = 1; level <= config.levels; ++level) {
    const int index = base + level - 1;
    const SimplicialMesh& mesh = meshes.levels[index];
    const MeshHierarchy sub = meshes.prefix(index + 1);
    const WgSystem sys = assemble(mesh, dom.problem);

    CsrMatrix reduced_matrix;
    std::vector<double> rhs;
    CsrMatrix pi;
    if (config.system == SystemKind::Full) {
      rhs = sys.rhs;
      pi = build_pi(mesh, sys.layout);
    } else {
      SchurSystem schur = schur_complement(split_blocks(sys));
      reduced_matrix = std::move(schur.S);
      rhs = std::move(schur.g);
      pi = build_pi_b(mesh, sys.layout);
    }
    const CsrMatrix& a = config.system == SystemKind::Full ? sys.matrix : reduced_matrix;
    const AuxiliarySpacePreconditioner pre = make_preconditioner(a, std::move(pi), sub, config.preconditioner);

    SolveReport report;
    pcg(as_operator(a), pre.as_operator(), rhs, {config.tol, config.max_iterations}, report);
    if (!report.converged) {
      throw std::runtime_error(config.example + " level " + std::to_string(level) + ": PCG stopped after " +
                               std::to_string(report.iterations) + " iterations at relative residual " +
                               std::to_string(report.final_true_residual));
    }

    ReportRow row;
    row.dof = a.rows();
    row.steps = report.iterations;
    row.time = report.wall_time_seconds;
    row.kappa = report.kappa_estimate;
    row.level = level;
    row.example = config.example;
    row.system = to_string(config.system);
    row.mode = to_string(config.preconditioner.mode);
    row.eps = config.eps;
    row.tol = config.tol;
    row.cells = mesh.num_cells();
    row.converged = report.converged;
    if (config.cross_check && level <= 2) row.cross_check_error = energy_gap(sys);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MmsRow> mms_convergence(const MmsConfig& config) {
  if (config.levels < 1) throw std::invalid_argument("mms_convergence: levels must be at least 1");
  ManufacturedSolution exact;
  CoefficientField coeff = CoefficientField::constant(1.0);
  std::function<double(const Point&)> a = [](const Point&) { return 1.0; };
  std::function<std::array<double, 2>(const Point&)> grad_a = [](const Point&) { return std::array{0.0, 0.0}; };
  if (config.coefficient == "osc") {
    coeff = osc_coefficient();
    a = osc;
    grad_a = [](const Point& x) {
      return std::array{20 * pi * std::cos(10 * pi * x[0]) * std::sin(10 * pi * x[1]),
                        20 * pi * std::sin(10 * pi * x[0]) * std::cos(10 * pi * x[1])};
    };
  } else if (config.coefficient != "identity") {
    throw std::invalid_argument("mms_convergence: unknown coefficient '" + config.coefficient + "'");
  }
  if (config.solution == "sine") {
    exact.u = [](const Point& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    exact.f = [a, grad_a](const Point& x) {
      const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]);
      const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]);
      const auto g = grad_a(x);
      return a(x) * 2 * pi * pi * sx * sy - (g[0] * pi * cx * sy + g[1] * pi * sx * cy);
    };
  } else if (config.solution == "linear") {
    exact.u = [](const Point& x) { return 1.0 + 2.0 * x[0] - 3.0 * x[1]; };
    exact.f = [grad_a](const Point& x) {
      const auto g = grad_a(x);
      return -(2.0 * g[0] - 3.0 * g[1]);
    };
  } else {
    throw std::invalid_argument("mms_convergence: unknown solution '" + config.solution + "'");
  }

  const SimplicialMesh coarse = label_all(structured_square(4), all_dirichlet);
  const MeshHierarchy meshes = build_hierarchy(coarse, config.base_refinements + config.levels);
  PreconditionerConfig pc;
  std::vector<MmsRow> rows;
  for (int level = 1; level <= config.levels; ++level) {
    const int index = config.base_refinements + level - 1;
    const SimplicialMesh& mesh = meshes.levels[index];
    const ManufacturedData data = apply_manufactured(mesh, exact, coeff);
    const WgSystem sys = assemble(mesh, data.problem);
    std::vector<double> x;
    SolveReport report;
    if (config.direct) {
      const BlockSystem blocks = split_blocks(sys);
      const SchurSystem schur = schur_complement(blocks);
      x = config.system == SystemKind::Full ? direct_solve(sys.matrix, sys.rhs)
                                            : [&] {
                                                const auto ub = direct_solve(schur.S, schur.g);
                                                return concatenate(ub, recover_interior(ub, blocks));
                                              }();
    } else if (config.system == SystemKind::Full) {
      const auto pre = make_preconditioner(sys.matrix, build_pi(mesh, sys.layout), meshes.prefix(index + 1), pc);
      x = pcg(as_operator(sys.matrix), pre.as_operator(), sys.rhs, {config.tol, 5000}, report);
    } else {
      const BlockSystem blocks = split_blocks(sys);
      const SchurSystem schur = schur_complement(blocks);
      const auto pre = make_preconditioner(schur.S, build_pi_b(mesh, sys.layout), meshes.prefix(index + 1), pc);
      const std::vector<double> ub = pcg(as_operator(schur.S), pre.as_operator(), schur.g, {config.tol, 5000}, report);
      x = concatenate(ub, recover_interior(ub, blocks));
    }
    const WgFunction uh = unpack(mesh, sys.layout, sys.to_wg_vector(std::move(x)));
    WgFunction diff = data.projection;
    double l2 = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      diff.cell[c] -= uh.cell[c];
      l2 += mesh.cell_volume(c) * diff.cell[c] * diff.cell[c];
    }
    for (Index f = 0; f < mesh.num_facets(); ++f) diff.facet[f] -= uh.facet[f];

    MmsRow row;
    row.level = level;
    for (Index c = 0; c < mesh.num_cells(); ++c) row.h = std::max(row.h, mesh.cell_diameter(c));
    row.dof = sys.layout.size();
    row.energy_error = energy_norm(mesh, coeff, diff);
    row.l2_error = std::sqrt(l2);
    row.steps = report.iterations;
    if (!rows.empty()) {
      const MmsRow& prev = rows.back();
      const double hr = std::log(prev.h / row.h);
      row.energy_rate = std::log(prev.energy_error / row.energy_error) / hr;
      row.l2_rate = std::log(prev.l2_error / row.l2_error) / hr;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json nullable(double v) { return std::isnan(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v); }

double from_nullable(const nlohmann::ordered_json& j) { return j.is_null() ? NAN : j.get<double>(); }

}  // namespace

std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format) {
  if (rows.empty()) throw std::invalid_argument("format_report: no rows to report");
  std::string out;
  switch (format) {
    case ReportFormat::Csv:
      out = "dof,steps,time,kappa,level\n";
      for (const auto& r : rows) {
        out += std::to_string(r.dof) + "," + std::to_string(r.steps) + "," + num(r.time) + "," + num(r.kappa) + "," +
               std::to_string(r.level) + "\n";
      }
      break;
    case ReportFormat::Dat:
      out = "# dof steps time kappa level\n";
      for (const auto& r : rows) {
        out += std::to_string(r.dof) + " " + std::to_string(r.steps) + " " + num(r.time) + " " + num(r.kappa) + " " +
               std::to_string(r.level) + "\n";
      }
      break;
    case ReportFormat::Json: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        arr.push_back({{"dof", r.dof},
                       {"steps", r.steps},
                       {"time", nullable(r.time)},
                       {"kappa", nullable(r.kappa)},
                       {"level", r.level},
                       {"example", r.example},
                       {"system", r.system},
                       {"mode", r.mode},
                       {"eps", r.eps},
                       {"tol", r.tol},
                       {"cells", r.cells},
                       {"converged", r.converged},
                       {"cross_check_error", nullable(r.cross_check_error)}});
      }
      out = arr.dump(2) + "\n";
      break;
    }
  }
  return out;
}

std::vector<ReportRow> parse_json_report(const std::string& text) {
  const auto arr = nlohmann::ordered_json::parse(text);
  if (!arr.is_array()) throw std::runtime_error("parse_json_report: expected a JSON array");
  std::vector<ReportRow> rows;
  for (const auto& j : arr) {
    ReportRow r;
    r.dof = j.at("dof").get<Index>();
    r.steps = j.at("steps").get<int>();
    r.time = from_nullable(j.at("time"));
    r.kappa = from_nullable(j.at("kappa"));
    r.level = j.at("level").get<int>();
    r.example = j.at("example").get<std::string>();
    r.system = j.at("system").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.eps = j.at("eps").get<double>();
    r.tol = j.at("tol").get<double>();
    r.cells = j.at("cells").get<Index>();
    r.converged = j.at("converged").get<bool>();
    r.cross_check_error = from_nullable(j.at("cross_check_error"));
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
  const std::string text = format_report(rows, format);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_report: cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw std::runtime_error("emit_report: write to '" + path + "' failed");
}

std::string format_mms(const std::vector<MmsRow>& rows, ReportFormat format) {
  if (rows.empty()) throw std::invalid_argument("format_mms: no rows to report");
  if (format == ReportFormat::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"level", r.level},
                     {"h", r.h},
                     {"dof", r.dof},
                     {"energy_error", r.energy_error},
                     {"l2_error", r.l2_error},
                     {"energy_rate", nullable(r.energy_rate)},
                     {"l2_rate", nullable(r.l2_rate)},
                     {"steps", r.steps}});
    }
    return arr.dump(2) + "\n";
  }
  const char sep = format == ReportFormat::Csv ? ',' : ' ';
  std::string out = format == ReportFormat::Csv ? "" : "# ";
  for (const char* h : {"level", "h", "dof", "energy_error", "l2_error", "energy_rate", "l2_rate", "steps"}) {
    out += h;
    out += sep;
  }
  out.back() = '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.level) + sep + num(r.h) + sep + std::to_string(r.dof) + sep + num(r.energy_error) + sep +
           num(r.l2_error) + sep + num(r.energy_rate) + sep + num(r.l2_rate) + sep + std::to_string(r.steps) + "\n";
  }
  return out;
}

}  // namespace wgmg
