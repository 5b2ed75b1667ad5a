#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "wgmg/bench.hpp"
#include "wgmg/reduction.hpp"
#include "wgmg/transfer.hpp"

using namespace wgmg;

namespace {

// Standard P1 stiffness on the free vertices, assembled element by element.
CsrMatrix p1_stiffness(const SimplicialMesh& mesh, const P1Space& space) {
  std::vector<Triplet> t;
  const int d = mesh.dim();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd m(d + 1, d + 1);
    for (int i = 0; i <= d; ++i) {
      m(i, 0) = 1.0;
      for (int k = 0; k < d; ++k) m(i, k + 1) = mesh.vertex(mesh.cell(c)[i])[k];
    }
    const Eigen::MatrixXd grads = m.inverse().bottomRows(d);
    const Eigen::MatrixXd k = mesh.cell_volume(c) * grads.transpose() * grads;
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        const Index a = space.free_index[mesh.cell(c)[i]], b = space.free_index[mesh.cell(c)[j]];
        if (a >= 0 && b >= 0) t.push_back({a, b, k(i, j)});
      }
  }
  return CsrMatrix::from_triplets(space.n_free, space.n_free, t);
}

}  // namespace

TEST_CASE("averaging stencil") {
  const SimplicialMesh mesh = test::labeled(test::two_triangle_square(), FacetLabel::neumann());
  const WgDofLayout layout = WgDofLayout::build(mesh);
  const P1Space space = P1Space::build(mesh);
  CHECK(space.n_free == 4);
  const CsrMatrix pi = build_pi(mesh, layout, space);
  for (Index f = 0; f < mesh.num_facets(); ++f) CHECK(pi.row_ptr()[f + 1] - pi.row_ptr()[f] == 2);
  for (Index c = 0; c < 2; ++c) CHECK(pi.row_ptr()[layout.interior_dof(c) + 1] - pi.row_ptr()[layout.interior_dof(c)] == 3);

  const std::vector<double> ones(4, 1.0);
  for (double v : pi.multiply(ones)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  // Hat function at vertex 2 = (1,1), which lies on the diagonal edge.
  std::vector<double> hat(4, 0.0);
  hat[2] = 1.0;
  const std::vector<double> w = pi.multiply(hat);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const auto& v = mesh.facets().vertices[f];
    CHECK(w[layout.facet_dof[f]] == doctest::Approx(v[0] == 2 || v[1] == 2 ? 0.5 : 0.0));
  }
  CHECK(w[layout.interior_dof(0)] == doctest::Approx(1.0 / 3.0));
  CHECK(w[layout.interior_dof(1)] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("Dirichlet vertices are excluded") {
  const SimplicialMesh mesh = build_hierarchy(test::labeled(test::two_triangle_square()), 2).finest();
  const WgDofLayout layout = WgDofLayout::build(mesh);
  const P1Space space = P1Space::build(mesh);
  CHECK(space.n_free == 1);
  const CsrMatrix pib = build_pi_b(mesh, layout, space);
  CHECK(pib.rows() == layout.n_facet_dofs);
  // The single free vertex feeds 1/2 into each incident free edge.
  const CsrMatrix t = pib.transpose();
  CHECK(t.nnz() == 6);
  for (double v : t.values()) CHECK(v == 0.5);
}

TEST_CASE("transpose identity and constant kernel") {
  std::mt19937_64 rng(5);
  for (const std::string name : {"lshape", "cube"}) {
    const Domain d = generate_domain(name);
    const SimplicialMesh mesh = build_hierarchy(d.coarse, 2).finest();
    const WgDofLayout layout = WgDofLayout::build(mesh);
    const CsrMatrix pi = build_pi(mesh, layout);
    const std::vector<double> v = test::random_vector(pi.rows(), rng), w = test::random_vector(pi.cols(), rng);
    CHECK(std::abs(dot(pi.multiply_transpose(v), w) - dot(v, pi.multiply(w))) < 1e-13 * pi.rows());

    const SimplicialMesh neumann = test::labeled(mesh, FacetLabel::neumann());
    const WgSystem sys = assemble(neumann, DiffusionProblem{});
    const CsrMatrix aux = aux_matrix(sys.matrix, build_pi(neumann, sys.layout));
    const std::vector<double> ones(static_cast<std::size_t>(aux.rows()), 1.0);
    for (double r : aux.multiply(ones)) CHECK(std::abs(r) < 1e-12);
    CHECK(max_asymmetry(aux) < 1e-12);
  }
}

TEST_CASE("triple product against a dense congruence") {
  const SimplicialMesh mesh = test::labeled(test::two_triangle_square(), FacetLabel::neumann());
  const WgSystem sys = assemble(mesh, DiffusionProblem{});
  const CsrMatrix pi = build_pi(mesh, sys.layout);
  const Eigen::MatrixXd p = test::dense(pi);
  const Eigen::MatrixXd oracle = p.transpose() * test::dense(sys.matrix) * p;
  CHECK((test::dense(aux_matrix(sys.matrix, pi)) - oracle).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS(aux_matrix(sys.matrix, build_pi_b(mesh, sys.layout)));
}

TEST_CASE("auxiliary matrices are SPD and spectrally equivalent to P1") {
  for (const std::string name : {"lshape", "cube"}) {
    const Domain d = generate_domain(name);
    const SimplicialMesh mesh = build_hierarchy(d.coarse, 2).finest();
    const WgSystem sys = assemble(mesh, DiffusionProblem{});
    const P1Space space = P1Space::build(mesh);
    const CsrMatrix aux = aux_matrix(sys.matrix, build_pi(mesh, sys.layout, space));
    const SchurSystem s = schur_complement(split_blocks(sys));
    const CsrMatrix aux_r = aux_matrix(s.S, build_pi_b(mesh, sys.layout, space));
    const Eigen::MatrixXd p1 = test::dense(p1_stiffness(mesh, space));
    for (const CsrMatrix* m : {&aux, &aux_r}) {
      const Eigen::MatrixXd dm = test::dense(*m);
      CHECK(Eigen::LLT<Eigen::MatrixXd>(dm).info() == Eigen::Success);
      // Generalized eigenvalues of (aux, P1) lie in a fixed band.
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(dm, p1, Eigen::EigenvaluesOnly);
      CHECK(ges.eigenvalues().minCoeff() > 0.05);
      CHECK(ges.eigenvalues().maxCoeff() < 2.0);
    }
  }
}

TEST_CASE("stability of the prolongations is level independent") {
  std::mt19937_64 rng(6);
  const Domain d = generate_domain("lshape");
  const MeshHierarchy h = build_hierarchy(d.coarse, 6);
  std::vector<double> cfull, cred;
  for (int l = 2; l < 6; ++l) {
    const SimplicialMesh& mesh = h.levels[l];
    const WgSystem sys = assemble(mesh, d.problem);
    const P1Space space = P1Space::build(mesh);
    const CsrMatrix p1 = p1_stiffness(mesh, space);
    const CsrMatrix pi = build_pi(mesh, sys.layout, space);
    const CsrMatrix pib = build_pi_b(mesh, sys.layout, space);
    const SchurSystem s = schur_complement(split_blocks(sys));
    double worst = 0.0, worst_r = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> w = test::random_vector(space.n_free, rng);
      const double ww = dot(w, p1.multiply(w));
      const std::vector<double> pw = pi.multiply(w), pbw = pib.multiply(w);
      worst = std::max(worst, std::sqrt(dot(pw, sys.matrix.multiply(pw)) / ww));
      worst_r = std::max(worst_r, std::sqrt(dot(pbw, s.S.multiply(pbw)) / ww));
    }
    cfull.push_back(worst);
    cred.push_back(worst_r);
  }
  for (std::size_t k = 0; k < cfull.size(); ++k) {
    CHECK(cfull[k] <= 1.5);
    CHECK(cred[k] <= 1.5);
    CHECK(cfull[k] == doctest::Approx(cfull[0]).epsilon(0.2));
    CHECK(cred[k] == doctest::Approx(cred[0]).epsilon(0.2));
  }
}
