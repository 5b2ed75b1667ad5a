#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wgmg/bench.hpp"

using namespace wgmg;

namespace {

bool inside_box(const Point& x, double lo, double hi) {
  for (int k = 0; k < 3; ++k)
    if (x[k] < lo - 1e-14 || x[k] > hi + 1e-14) return false;
  return true;
}

std::vector<int> steps_for(const std::string& example, int levels, SystemKind system, double eps = 1.0) {
  ExperimentConfig cfg;
  cfg.example = example;
  cfg.levels = levels;
  cfg.system = system;
  cfg.eps = eps;
  cfg.cross_check = false;
  std::vector<int> steps;
  for (const ReportRow& r : run_experiment(cfg)) steps.push_back(r.steps);
  return steps;
}

ReportRow sample_row() {
  ReportRow r;
  r.dof = 1234;
  r.steps = 13;
  r.time = 0.125;
  r.kappa = 3.0625;
  r.level = 2;
  r.example = "disk";
  r.system = "full";
  r.mode = "mul";
  r.cells = 512;
  r.converged = true;
  return r;
}

}  // namespace

TEST_CASE("jump-cube regions align with cells on every level") {
  const Domain d = generate_domain("jump-cube");
  const MeshHierarchy h = build_hierarchy(d.coarse, 2);
  for (const SimplicialMesh& m : h.levels) {
    for (Index c = 0; c < m.num_cells(); ++c) {
      std::array<bool, 3> in{true, true, true};
      for (int i = 0; i < 4; ++i) {
        const Point& x = m.vertex(m.cell(c)[i]);
        in[1] = in[1] && inside_box(x, -0.5, 0.0);
        in[2] = in[2] && inside_box(x, 0.0, 0.5);
      }
      const int region = m.cell_region(c);
      if (region == 1) CHECK(in[1]);
      if (region == 2) CHECK(in[2]);
      // Outer cells may touch the inner boxes but must not lie inside them.
      if (region == 0) CHECK((!in[1] && !in[2]));
    }
  }
  std::array<double, 3> volume{};
  for (Index c = 0; c < h.levels[0].num_cells(); ++c) volume[h.levels[0].cell_region(c)] += h.levels[0].cell_volume(c);
  CHECK(volume[1] == doctest::Approx(0.125));
  CHECK(volume[2] == doctest::Approx(0.125));
  CHECK(volume[0] == doctest::Approx(8.0 - 0.25));
}

TEST_CASE("jump-cube boundary labels") {
  const SimplicialMesh& m = generate_domain("jump-cube").coarse;
  for (Index f = 0; f < m.num_facets(); ++f) {
    if (!m.facets().is_boundary(f)) continue;
    const Point c = m.facet_centroid(f);
    const FacetLabel& l = m.facet_label(f);
    if (std::abs(c[0] + 1.0) < 1e-12) CHECK(l == FacetLabel::dirichlet(0));
    else if (std::abs(c[0] - 1.0) < 1e-12) CHECK(l == FacetLabel::dirichlet(1));
    else CHECK(l == FacetLabel::neumann(0));
  }
}

TEST_CASE("osc-square coefficient value") {
  const Domain d = generate_domain("osc-square");
  CHECK(d.problem.coefficient.evaluate({0.05, 0.05, 0.0}, 0)(0, 0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(d.problem.coefficient.evaluate({0.05, 0.05, 0.0}, 0)(0, 1) == 0.0);
}

TEST_CASE("disk area approaches pi") {
  const Domain d = generate_domain("disk");
  const MeshHierarchy h = build_hierarchy(d.coarse, 5, d.snap);
  CHECK(std::abs(h.finest().total_volume() - M_PI) < 0.01 * M_PI);
  CHECK(h.finest().total_volume() < M_PI);
}

TEST_CASE("domain generation errors") {
  CHECK_THROWS(generate_domain("torus"));
  CHECK_THROWS(generate_domain("jump-cube", {0.0}));
  for (const std::string& name : example_names()) {
    const Domain d = generate_domain(name);
    CHECK(d.coarse.fully_labeled());
  }
}

TEST_CASE("dof growth and reduced size accounting") {
  for (const std::string name : {"lshape", "jump-cube"}) {
    for (const SystemKind system : {SystemKind::Full, SystemKind::Reduced}) {
      ExperimentConfig cfg;
      cfg.example = name;
      cfg.levels = 3;
      cfg.system = system;
      cfg.cross_check = false;
      const auto rows = run_experiment(cfg);
      const double factor = name == "lshape" ? 4.0 : 8.0;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = static_cast<double>(rows[i].dof) / rows[i - 1].dof;
        CHECK(ratio > 0.8 * factor);
        CHECK(ratio < 1.2 * factor);
        CHECK(rows[i].cells == static_cast<Index>(factor) * rows[i - 1].cells);
      }
      if (system == SystemKind::Reduced) {
        cfg.system = SystemKind::Full;
        const auto full = run_experiment(cfg);
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].dof == full[i].dof - full[i].cells);
      }
    }
  }
}

TEST_CASE("jump-cube steps are monotone in eps at a fixed level") {
  std::map<double, int> steps;
  for (double eps : {1e-4, 1e-2, 1.0, 1e2, 1e4}) steps[eps] = steps_for("jump-cube", 2, SystemKind::Reduced, eps).back();
  CHECK(steps[1e-4] >= steps[1e-2]);
  CHECK(steps[1e-2] >= steps[1.0]);
  CHECK(std::abs(steps[1e2] - steps[1.0]) <= 1);
  CHECK(std::abs(steps[1e4] - steps[1.0]) <= 1);
}

TEST_CASE("disk steps are flat after level 2") {
  const std::vector<int> steps = steps_for("disk", 3, SystemKind::Full);
  CHECK(std::abs(steps[2] - steps[1]) <= 1);
}

TEST_CASE("experiment rows echo the configuration") {
  ExperimentConfig cfg;
  cfg.example = "lshape";
  cfg.levels = 2;
  cfg.system = SystemKind::Reduced;
  cfg.preconditioner.mode = PreconditionerMode::Additive;
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 2);
  for (const ReportRow& r : rows) {
    CHECK(r.example == "lshape");
    CHECK(r.system == "reduced");
    CHECK(r.mode == "add");
    CHECK(r.steps >= 1);
    CHECK(r.dof > 0);
    CHECK(r.converged);
    CHECK(r.cross_check_error < 1e-8);
  }
  ExperimentConfig bad = cfg;
  bad.levels = 0;
  CHECK_THROWS(run_experiment(bad));
  bad = cfg;
  bad.eps = -1.0;
  CHECK_THROWS(run_experiment(bad));
}

TEST_CASE("parsers") {
  CHECK(parse_system("full") == SystemKind::Full);
  CHECK(parse_system("reduced") == SystemKind::Reduced);
  CHECK(parse_mode("add") == PreconditionerMode::Additive);
  CHECK(parse_mode("mul") == PreconditionerMode::Multiplicative);
  CHECK(parse_format("dat") == ReportFormat::Dat);
  CHECK_THROWS(parse_system("half"));
  CHECK_THROWS(parse_mode("sub"));
  CHECK_THROWS(parse_format("xml"));
}

TEST_CASE("report formats") {
  CHECK_THROWS(emit_report({}, ReportFormat::Csv, "-"));
  const std::vector<ReportRow> one{sample_row()};
  const std::string csv = format_report(one, ReportFormat::Csv);
  CHECK(csv == "dof,steps,time,kappa,level\n1234,13,0.125,3.0625,2\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(format_report(one, ReportFormat::Dat) == "# dof steps time kappa level\n1234 13 0.125 3.0625 2\n");

  std::vector<ReportRow> rows{sample_row(), sample_row()};
  rows[1].level = 3;
  rows[1].time = 1.0 / 3.0;
  rows[1].cross_check_error = 2.5e-15;
  const std::string json = format_report(rows, ReportFormat::Json);
  CHECK(parse_json_report(json) == rows);
  CHECK(format_report(rows, ReportFormat::Json) == json);

  const auto dir = std::filesystem::temp_directory_path() / "wgmg_bench_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "r.csv").string();
  emit_report(one, ReportFormat::Csv, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  CHECK_THROWS(emit_report(one, ReportFormat::Csv, (dir / "missing" / "r.csv").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("manufactured solutions") {
  MmsConfig cfg;
  cfg.levels = 3;
  cfg.solution = "linear";
  cfg.direct = true;
  for (const MmsRow& r : mms_convergence(cfg)) {
    CHECK(r.energy_error < 1e-10);
    CHECK(r.l2_error < 1e-10);
  }
  cfg.solution = "sine";
  cfg.direct = false;
  const auto rows = mms_convergence(cfg);
  CHECK(std::isnan(rows[0].energy_rate));
  CHECK(rows[2].energy_rate == doctest::Approx(1.0).epsilon(0.15));
  CHECK(rows[2].l2_rate == doctest::Approx(2.0).epsilon(0.1));
  cfg.system = SystemKind::Reduced;
  const auto reduced = mms_convergence(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(reduced[i].energy_error == doctest::Approx(rows[i].energy_error).epsilon(1e-6));
  cfg.solution = "cubic";
  CHECK_THROWS(mms_convergence(cfg));
}
