#include "wgmg/transfer.hpp"

#include <stdexcept>

namespace wgmg {
namespace {

void facet_rows(const SimplicialMesh& mesh, const WgDofLayout& layout, const P1Space& space,
                std::vector<Triplet>& out) {
  const int d = mesh.dim();
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const Index row = layout.facet_dof[f];
    if (row < 0) continue;
    for (int i = 0; i < d; ++i) {
      const Index col = space.free_index[mesh.facets().vertices[f][i]];
      if (col >= 0) out.push_back({row, col, 1.0 / d});
    }
  }
}

}  // namespace

P1Space P1Space::build(const SimplicialMesh& mesh) {
  P1Space s;
  const std::vector<bool> fixed = mesh.dirichlet_vertices();
  s.free_index.assign(fixed.size(), -1);
  for (std::size_t v = 0; v < fixed.size(); ++v) {
    if (!fixed[v]) s.free_index[v] = s.n_free++;
  }
  return s;
}

CsrMatrix build_pi(const SimplicialMesh& mesh, const WgDofLayout& layout, const P1Space& space) {
  std::vector<Triplet> t;
  facet_rows(mesh, layout, space, t);
  const int d = mesh.dim();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i <= d; ++i) {
      const Index col = space.free_index[mesh.cell(c)[i]];
      if (col >= 0) t.push_back({layout.interior_dof(c), col, 1.0 / (d + 1)});
    }
  }
  return CsrMatrix::from_triplets(layout.size(), space.n_free, t);
}

CsrMatrix build_pi(const SimplicialMesh& mesh, const WgDofLayout& layout) {
  return build_pi(mesh, layout, P1Space::build(mesh));
}

CsrMatrix build_pi_b(const SimplicialMesh& mesh, const WgDofLayout& layout, const P1Space& space) {
  std::vector<Triplet> t;
  facet_rows(mesh, layout, space, t);
  return CsrMatrix::from_triplets(layout.n_facet_dofs, space.n_free, t);
}

CsrMatrix build_pi_b(const SimplicialMesh& mesh, const WgDofLayout& layout) {
  return build_pi_b(mesh, layout, P1Space::build(mesh));
}

CsrMatrix aux_matrix(const CsrMatrix& a, const CsrMatrix& pi) {
  if (a.rows() != a.cols() || a.cols() != pi.rows()) {
    throw std::invalid_argument("aux_matrix: prolongation rows do not match the system size");
  }
  return galerkin_product(pi, a);
}

}  // namespace wgmg
