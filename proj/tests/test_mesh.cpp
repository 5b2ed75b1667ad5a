#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "support.hpp"
#include "wgmg/bench.hpp"
#include "wgmg/mesh.hpp"

using namespace wgmg;
using test::labeled;

namespace {

// Every (d-1)-subset of every cell, deduplicated.
std::set<std::vector<Index>> brute_force_facets(const SimplicialMesh& m) {
  std::set<std::vector<Index>> s;
  for (const Cell& c : m.cells()) {
    for (int skip = 0; skip <= m.dim(); ++skip) {
      std::vector<Index> f;
      for (int i = 0; i <= m.dim(); ++i)
        if (i != skip) f.push_back(c[i]);
      std::sort(f.begin(), f.end());
      s.insert(f);
    }
  }
  return s;
}

void check_facet_table(const SimplicialMesh& m) {
  const auto expected = brute_force_facets(m);
  REQUIRE(static_cast<std::size_t>(m.num_facets()) == expected.size());
  std::vector<int> adjacency(static_cast<std::size_t>(m.num_facets()), 0);
  for (Index c = 0; c < m.num_cells(); ++c)
    for (int i = 0; i <= m.dim(); ++i) ++adjacency[m.facets().cell_facets[c][i]];
  for (Index f = 0; f < m.num_facets(); ++f) {
    const std::vector<Index> key(m.facets().vertices[f].begin(), m.facets().vertices[f].begin() + m.dim());
    CHECK(expected.count(key) == 1);
    CHECK(adjacency[f] == (m.facets().is_boundary(f) ? 1 : 2));
    if (f > 0) CHECK(m.facets().vertices[f - 1] < m.facets().vertices[f]);
  }
}

}  // namespace

TEST_CASE("facet enumeration on small meshes") {
  const SimplicialMesh one = test::reference_triangle();
  CHECK(one.num_facets() == 3);
  CHECK(one.num_boundary_facets() == 3);

  const SimplicialMesh two = test::two_triangle_square();
  CHECK(two.num_facets() == 5);
  CHECK(two.num_facets() - two.num_boundary_facets() == 1);

  const SimplicialMesh cube = kuhn_cube(1, 0.0, 1.0);
  CHECK(cube.num_cells() == 6);
  CHECK(cube.num_facets() == 18);
  CHECK(cube.num_facets() - cube.num_boundary_facets() == 6);
  check_facet_table(cube);
  check_facet_table(kuhn_cube(2));
  check_facet_table(refine_uniform(two).mesh);
}

TEST_CASE("nonmanifold facets are rejected") {
  const std::vector<Cell> cells{{0, 1, 2, -1}, {0, 1, 3, -1}, {0, 1, 4, -1}};
  CHECK_THROWS_WITH(build_facets(2, cells), doctest::Contains("nonmanifold"));
}

TEST_CASE("inverted and degenerate cells are rejected") {
  CHECK_THROWS_WITH(SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {Cell{0, 2, 1, -1}}),
                    doctest::Contains("inverted"));
  CHECK_THROWS_WITH(SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {Cell{0, 1, 2, -1}}),
                    doctest::Contains("zero measure"));
}

TEST_CASE("red refinement combinatorics") {
  const Refinement tri = refine_uniform(test::reference_triangle());
  CHECK(tri.mesh.num_cells() == 4);
  CHECK(tri.mesh.num_vertices() == 6);
  CHECK(tri.mesh.num_facets() == 9);

  const Refinement tet = refine_uniform(test::reference_tetrahedron());
  CHECK(tet.mesh.num_cells() == 8);
  CHECK(tet.mesh.num_vertices() == 10);
  CHECK(tet.mesh.total_volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const MeshHierarchy h = build_hierarchy(test::two_triangle_square(), 3);
  CHECK(h.levels[1].num_cells() == 8);
  CHECK(h.levels[2].num_cells() == 32);
  CHECK(h.levels[2].num_vertices() == 25);
  CHECK(build_hierarchy(test::two_triangle_square(), 1).num_levels() == 1);
}

TEST_CASE("refinement invariants") {
  std::vector<SimplicialMesh> meshes{labeled(test::two_triangle_square()), generate_domain("lshape").coarse,
                                     generate_domain("cube").coarse, generate_domain("jump-cube").coarse};
  for (const auto& coarse : meshes) {
    const MeshHierarchy h = build_hierarchy(coarse, coarse.dim() == 2 ? 4 : 3);
    for (int l = 0; l + 1 < h.num_levels(); ++l) {
      const SimplicialMesh& c = h.levels[l];
      const SimplicialMesh& f = h.levels[l + 1];
      CHECK(f.num_cells() == (c.dim() == 2 ? 4 : 8) * c.num_cells());
      CHECK(std::abs(f.total_volume() - c.total_volume()) <= 1e-12 * c.total_volume());
      for (Index v = 0; v < f.num_vertices(); ++v) {
        const ParentVertex& p = h.parents[l][v];
        for (int k = 0; k < 3; ++k) {
          const double expect =
              p.is_midpoint() ? 0.5 * (c.vertex(p.first)[k] + c.vertex(p.second)[k]) : c.vertex(p.first)[k];
          CHECK(std::abs(f.vertex(v)[k] - expect) <= 1e-14);
        }
      }
      if (f.dim() == 2) CHECK(2 * f.num_facets() == 3 * f.num_cells() + f.num_boundary_facets());
      CHECK(f.fully_labeled());
    }
    // Red refinement in 2D produces similar children. In 3D the diagonal rule
    // adds one new shape class at the second refinement, after which shapes repeat.
    const double r1 = h.levels[1].max_shape_ratio();
    CHECK(h.finest().max_shape_ratio() <= (coarse.dim() == 2 ? 1.0 + 1e-9 : 1.2) * r1);
  }
}

TEST_CASE("3D diagonal choice is deterministic and conforming") {
  const SimplicialMesh a = refine_uniform(kuhn_cube(2)).mesh;
  const SimplicialMesh b = refine_uniform(kuhn_cube(2)).mesh;
  CHECK(a.cells() == b.cells());
  check_facet_table(a);
  // Each octahedron is cut along its shortest diagonal, so no child is longer
  // than the parent's longest edge.
  double coarse_diam = 0.0, fine_diam = 0.0;
  const SimplicialMesh c = kuhn_cube(2);
  for (Index k = 0; k < c.num_cells(); ++k) coarse_diam = std::max(coarse_diam, c.cell_diameter(k));
  for (Index k = 0; k < a.num_cells(); ++k) fine_diam = std::max(fine_diam, a.cell_diameter(k));
  CHECK(fine_diam <= 0.5 * coarse_diam + 1e-14);
}

TEST_CASE("labels and regions are inherited") {
  const Domain jump = generate_domain("jump-cube");
  const MeshHierarchy h = build_hierarchy(jump.coarse, 2);
  const SimplicialMesh& fine = h.finest();
  for (Index f = 0; f < fine.num_facets(); ++f) {
    if (!fine.facets().is_boundary(f)) continue;
    const Point x = fine.facet_centroid(f);
    const FacetLabel& l = fine.facet_label(f);
    if (std::abs(x[0] + 1) < 1e-12) {
      CHECK(l == FacetLabel::dirichlet(0));
    } else if (std::abs(x[0] - 1) < 1e-12) {
      CHECK(l == FacetLabel::dirichlet(1));
    } else {
      CHECK(l == FacetLabel::neumann(0));
    }
  }
  auto inside = [](const Point& x, double lo, double hi) {
    return x[0] > lo && x[0] < hi && x[1] > lo && x[1] < hi && x[2] > lo && x[2] < hi;
  };
  for (Index c = 0; c < fine.num_cells(); ++c) {
    const Point x = fine.cell_centroid(c);
    const int expect = inside(x, -0.5, 0.0) ? 1 : inside(x, 0.0, 0.5) ? 2 : 0;
    CHECK(fine.cell_region(c) == expect);
  }
}

TEST_CASE("boundary classification") {
  const SimplicialMesh sq = labeled(test::two_triangle_square());
  for (Index f = 0; f < sq.num_facets(); ++f) {
    CHECK(sq.facet_label(f) == (sq.facets().is_boundary(f) ? FacetLabel::dirichlet(0) : FacetLabel{}));
  }
  CHECK_THROWS_WITH(classify_boundary(sq, [](const Point& x) -> std::optional<FacetLabel> {
                      if (x[0] == 0.0) return FacetLabel::dirichlet(0);
                      return std::nullopt;
                    }),
                    doctest::Contains("unlabeled"));

  // The surface of a tetrahedron as a closed 2-manifold: no boundary at all.
  const std::vector<Cell> surface{{0, 1, 2, -1}, {0, 1, 3, -1}, {0, 2, 3, -1}, {1, 2, 3, -1}};
  const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const FacetTable closed = build_facets(2, surface);
  CHECK_THROWS_WITH(classify_boundary(2, closed, pts, [](const Point&) { return FacetLabel::neumann(0); }),
                    doctest::Contains("no boundary"));
}

TEST_CASE("disk snapping puts boundary vertices on the unit circle") {
  const Domain disk = generate_domain("disk");
  const MeshHierarchy h = build_hierarchy(disk.coarse, 5, disk.snap);
  for (int l = 1; l < h.num_levels(); ++l) {
    const SimplicialMesh& m = h.levels[l];
    std::vector<bool> boundary(static_cast<std::size_t>(m.num_vertices()), false);
    for (Index f = 0; f < m.num_facets(); ++f)
      if (m.facets().is_boundary(f))
        for (int i = 0; i < 2; ++i) boundary[m.facets().vertices[f][i]] = true;
    for (Index v = 0; v < m.num_vertices(); ++v) {
      if (boundary[v]) CHECK(std::abs(std::hypot(m.vertex(v)[0], m.vertex(v)[1]) - 1.0) < 1e-12);
      // Snapped vertices are exactly the new boundary midpoints.
      CHECK(h.snapped[l - 1][v] == (boundary[v] && h.parents[l - 1][v].is_midpoint()));
    }
  }
  // Polygon-area oracle: an inscribed polygon with 8 * 2^4 sides.
  const int sides = 8 * 16;
  const double polygon = 0.5 * sides * std::sin(2 * M_PI / sides);
  CHECK(h.finest().total_volume() == doctest::Approx(polygon).epsilon(1e-12));
  CHECK(std::abs(h.finest().total_volume() - M_PI) < 0.01 * M_PI);
}

TEST_CASE("mesh file round trip is bit exact") {
  for (const std::string name : {"disk", "jump-cube"}) {
    const Domain d = generate_domain(name);
    const SimplicialMesh m = build_hierarchy(d.coarse, 2, d.snap).finest();
    std::stringstream first;
    write_mesh(m, first);
    const SimplicialMesh back = read_mesh(first);
    CHECK(back.vertices() == m.vertices());
    CHECK(back.cells() == m.cells());
    CHECK(back.cell_regions() == m.cell_regions());
    CHECK(back.facet_labels() == m.facet_labels());
    std::stringstream second;
    write_mesh(back, second);
    CHECK(second.str() == first.str());
  }
}

TEST_CASE("malformed mesh files are rejected") {
  std::istringstream bad_header("4 1 3\n");
  CHECK_THROWS(read_mesh(bad_header));
  std::istringstream short_file("2 1 3\n0 0\n1 0\n");
  CHECK_THROWS(read_mesh(short_file));
  std::istringstream bad_id("2 1 3\n0 0\n1 0\n0 1\n0 1 7\n");
  CHECK_THROWS(read_mesh(bad_id));
}
