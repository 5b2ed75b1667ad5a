#include "wgmg/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wgmg/parallel.hpp"

namespace wgmg {

BlockSystem split_blocks(const CsrMatrix& a, std::span<const double> rhs, const WgDofLayout& layout) {
  const Index nb = layout.n_facet_dofs;
  const Index n = layout.size();
  if (a.rows() != n || a.cols() != n || rhs.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("split_blocks: system size does not match the dof layout");
  }
  BlockSystem b;
  b.A_b = a.block(0, nb, 0, nb);
  b.A_b0 = a.block(0, nb, nb, n);
  b.A_0b = a.block(nb, n, 0, nb);
  b.A_0 = a.block(nb, n, nb, n);
  b.f_b.assign(rhs.begin(), rhs.begin() + nb);
  b.f_0.assign(rhs.begin() + nb, rhs.end());

  const auto ptr = b.A_0.row_ptr();
  const auto col = b.A_0.col_idx();
  const auto val = b.A_0.values();
  b.a0_diag.assign(static_cast<std::size_t>(b.A_0.rows()), 0.0);
  for (Index i = 0; i < b.A_0.rows(); ++i) {
    for (Index k = ptr[i]; k < ptr[i + 1]; ++k) {
      if (col[k] == i) {
        b.a0_diag[i] = val[k];
      } else if (val[k] != 0.0) {
        throw std::runtime_error("split_blocks: interior block is not diagonal; dofs are not in [facet; interior] order");
      }
    }
    if (!(b.a0_diag[i] > 0.0)) {
      throw std::runtime_error("split_blocks: nonpositive interior diagonal at cell " + std::to_string(i));
    }
  }

  const CsrMatrix t = b.A_b0.transpose();
  double scale = 1.0;
  for (double d : b.a0_diag) scale = std::max(scale, d);
  if (max_abs_difference(t, b.A_0b) > 1e-13 * scale) {
    throw std::runtime_error("split_blocks: A_0b is not the transpose of A_b0");
  }
  return b;
}

BlockSystem split_blocks(const WgSystem& system) { return split_blocks(system.matrix, system.rhs, system.layout); }

SchurSystem schur_complement(const BlockSystem& blocks) {
  const Index nb = blocks.num_facet_dofs();
  const Index n0 = blocks.num_interior_dofs();
  for (Index c = 0; c < n0; ++c) {
    if (!(blocks.a0_diag[c] > 0.0)) {
      throw std::runtime_error("schur_complement: nonpositive interior diagonal at cell " + std::to_string(c));
    }
  }

  // Row c of A_0b holds the couplings of interior dof c, so each cell adds
  // -a a^T / a_cc over its free facets.
  const auto ptr = blocks.A_0b.row_ptr();
  const auto col = blocks.A_0b.col_idx();
  const auto val = blocks.A_0b.values();
  const int workers = worker_count();
  std::vector<std::vector<Triplet>> buffers(static_cast<std::size_t>(workers));
  parallel_chunks(
      n0,
      [&](long begin, long end, int w) {
        auto& out = buffers[w];
        for (long cl = begin; cl < end; ++cl) {
          const auto c = static_cast<Index>(cl);
          const double inv = 1.0 / blocks.a0_diag[c];
          for (Index i = ptr[c]; i < ptr[c + 1]; ++i)
            for (Index j = ptr[c]; j < ptr[c + 1]; ++j) out.push_back({col[i], col[j], -val[i] * val[j] * inv});
        }
      },
      workers);

  std::vector<Triplet> all;
  const auto bptr = blocks.A_b.row_ptr();
  const auto bcol = blocks.A_b.col_idx();
  const auto bval = blocks.A_b.values();
  for (Index i = 0; i < nb; ++i)
    for (Index k = bptr[i]; k < bptr[i + 1]; ++k) all.push_back({i, bcol[k], bval[k]});
  for (const auto& b : buffers) all.insert(all.end(), b.begin(), b.end());

  SchurSystem s;
  s.S = CsrMatrix::from_triplets(nb, nb, all);
  std::vector<double> scaled(static_cast<std::size_t>(n0));
  for (Index c = 0; c < n0; ++c) scaled[c] = blocks.f_0[c] / blocks.a0_diag[c];
  s.g = blocks.f_b;
  const std::vector<double> corr = blocks.A_b0.multiply(scaled);
  for (Index i = 0; i < nb; ++i) s.g[i] -= corr[i];
  return s;
}

std::vector<double> recover_interior(std::span<const double> u_b, const BlockSystem& blocks) {
  if (u_b.size() != static_cast<std::size_t>(blocks.num_facet_dofs())) {
    throw std::invalid_argument("recover_interior: facet vector has the wrong length");
  }
  std::vector<double> u0 = blocks.A_0b.multiply(u_b);
  for (std::size_t c = 0; c < u0.size(); ++c) u0[c] = (blocks.f_0[c] - u0[c]) / blocks.a0_diag[c];
  return u0;
}

std::vector<double> concatenate(std::span<const double> u_b, std::span<const double> u_0) {
  std::vector<double> u(u_b.begin(), u_b.end());
  u.insert(u.end(), u_0.begin(), u_0.end());
  return u;
}

}  // namespace wgmg
