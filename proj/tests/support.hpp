#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "wgmg/mesh.hpp"
#include "wgmg/solver.hpp"
#include "wgmg/sparse.hpp"

namespace wgmg::test {

inline Eigen::MatrixXd dense(const CsrMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) d(i, a.col_idx()[k]) += a.values()[k];
  return d;
}

/// Dense matrix of a linear operator, one column per unit vector.
inline Eigen::MatrixXd dense(const LinearOperator& op, Index n) {
  Eigen::MatrixXd d(n, n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0), y(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op(e, y);
    for (Index i = 0; i < n; ++i) d(i, j) = y[i];
    e[j] = 0.0;
  }
  return d;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

inline SimplicialMesh labeled(SimplicialMesh mesh, FacetLabel label = FacetLabel::dirichlet(0)) {
  mesh.set_facet_labels(classify_boundary(mesh, [label](const Point&) { return label; }));
  return mesh;
}

/// Unit square split along the diagonal (0,0)-(1,1).
inline SimplicialMesh two_triangle_square() {
  return SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {Cell{0, 1, 2, -1}, Cell{0, 2, 3, -1}});
}

inline SimplicialMesh reference_triangle() {
  return SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {Cell{0, 1, 2, -1}});
}

inline SimplicialMesh reference_tetrahedron() {
  return SimplicialMesh(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Cell{0, 1, 2, 3}});
}

}  // namespace wgmg::test
