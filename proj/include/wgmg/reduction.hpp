#pragma once

#include <span>
#include <vector>

#include "wgmg/sparse.hpp"
#include "wgmg/wg.hpp"

namespace wgmg {

/// [[A_b, A_b0], [A_0b, A_0]] with A_0 diagonal.
struct BlockSystem {
  CsrMatrix A_b;
  CsrMatrix A_b0;
  CsrMatrix A_0b;
  CsrMatrix A_0;
  std::vector<double> a0_diag;
  std::vector<double> f_b;
  std::vector<double> f_0;

  Index num_facet_dofs() const { return A_b.rows(); }
  Index num_interior_dofs() const { return A_0.rows(); }
};

/// Throws when the interior block is not diagonal with positive entries or the
/// off-diagonal blocks are not transposes of each other.
BlockSystem split_blocks(const CsrMatrix& a, std::span<const double> rhs, const WgDofLayout& layout);
BlockSystem split_blocks(const WgSystem& system);

/// S = A_b - A_b0 A_0^{-1} A_0b, g = f_b - A_b0 A_0^{-1} f_0.
struct SchurSystem {
  CsrMatrix S;
  std::vector<double> g;
};

SchurSystem schur_complement(const BlockSystem& blocks);

/// u_0 = A_0^{-1} (f_0 - A_0b u_b).
std::vector<double> recover_interior(std::span<const double> u_b, const BlockSystem& blocks);

/// [u_b; u_0] in layout order.
std::vector<double> concatenate(std::span<const double> u_b, std::span<const double> u_0);

}  // namespace wgmg
