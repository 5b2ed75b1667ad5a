#pragma once

#include <vector>

#include "wgmg/mesh.hpp"
#include "wgmg/sparse.hpp"
#include "wgmg/wg.hpp"

namespace wgmg {

/// Conforming P1 space on the non-Dirichlet vertices.
struct P1Space {
  /// -1 on vertices lying on a Dirichlet facet.
  std::vector<Index> free_index;
  Index n_free = 0;

  static P1Space build(const SimplicialMesh& mesh);
};

/// Averaging map from P1 into the WG dofs: facet means in facet rows, cell
/// means in interior rows. Dirichlet vertices are not columns.
CsrMatrix build_pi(const SimplicialMesh& mesh, const WgDofLayout& layout, const P1Space& space);
CsrMatrix build_pi(const SimplicialMesh& mesh, const WgDofLayout& layout);

/// Facet rows of build_pi only.
CsrMatrix build_pi_b(const SimplicialMesh& mesh, const WgDofLayout& layout, const P1Space& space);
CsrMatrix build_pi_b(const SimplicialMesh& mesh, const WgDofLayout& layout);

/// Pi^T A Pi
CsrMatrix aux_matrix(const CsrMatrix& a, const CsrMatrix& pi);

}  // namespace wgmg
