#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace wgmg {

using Index = std::int32_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing. Structural zeros produced by assembly are kept.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
            std::vector<double> values);

  /// Duplicates are summed in the order they appear in `triplets`, so the
  /// result depends only on the triplet sequence.
  static CsrMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
  static CsrMatrix identity(Index n);
  static CsrMatrix diagonal(std::span<const double> diag);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  /// r = b - A x
  void residual(std::span<const double> b, std::span<const double> x, std::span<double> r) const;

  /// Entry (i, j), zero when not stored.
  double coeff(Index i, Index j) const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;

  /// Rows [r0, r1) and columns [c0, c1), re-indexed from zero.
  CsrMatrix block(Index r0, Index r1, Index c0, Index c1) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// C = A B (Gustavson row-by-row product).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// P^T A P, averaged with its transpose when the pattern is symmetric.
CsrMatrix galerkin_product(const CsrMatrix& p, const CsrMatrix& a);

/// max |a_ij - a_ji| over the union of both patterns.
double max_asymmetry(const CsrMatrix& a);

/// max |a_ij - b_ij|; dimensions must agree.
double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b);

/// Matrix Market coordinate (real general) output.
void write_matrix_market(const CsrMatrix& a, std::ostream& os);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace wgmg
