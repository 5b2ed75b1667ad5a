#include "wgmg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wgmg {

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                     std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0 || row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 ||
      col_idx_.size() != values_.size() || static_cast<std::size_t>(row_ptr_.back()) != values_.size()) {
    throw std::invalid_argument("CsrMatrix: inconsistent storage arrays");
  }
}

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets) {
  std::vector<Index> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("CsrMatrix::from_triplets: index (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  // Stable counting sort by row keeps the input order of duplicates.
  std::vector<Index> order(triplets.size());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < triplets.size(); ++k) order[next[triplets[k].row]++] = static_cast<Index>(k);
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (Index i = 0; i < rows; ++i) {
    auto first = order.begin() + count[i];
    auto last = order.begin() + count[i + 1];
    std::stable_sort(first, last, [&](Index a, Index b) { return triplets[a].col < triplets[b].col; });
    for (auto it = first; it != last;) {
      const Index c = triplets[*it].col;
      double sum = 0.0;
      for (; it != last && triplets[*it].col == c; ++it) sum += triplets[*it].value;
      col_idx.push_back(c);
      values.push_back(sum);
    }
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> diag) {
  const auto n = static_cast<Index>(diag.size());
  std::vector<Index> row_ptr(diag.size() + 1);
  std::vector<Index> col_idx(diag.size());
  std::iota(row_ptr.begin(), row_ptr.end(), 0);
  std::iota(col_idx.begin(), col_idx.end(), 0);
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(diag.begin(), diag.end()));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("CsrMatrix::multiply: dimension mismatch");
  }
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(rows_) || y.size() != static_cast<std::size_t>(cols_)) {
    throw std::invalid_argument("CsrMatrix::multiply_transpose: dimension mismatch");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < rows_; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * xi;
  }
}

std::vector<double> CsrMatrix::multiply_transpose(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(cols_));
  multiply_transpose(x, y);
  return y;
}

void CsrMatrix::residual(std::span<const double> b, std::span<const double> x, std::span<double> r) const {
  if (b.size() != static_cast<std::size_t>(rows_) || r.size() != b.size() ||
      x.size() != static_cast<std::size_t>(cols_)) {
    throw std::invalid_argument("CsrMatrix::residual: dimension mismatch");
  }
  for (Index i = 0; i < rows_; ++i) {
    double s = b[i];
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s -= values_[k] * x[col_idx_[k]];
    r[i] = s;
  }
}

double CsrMatrix::coeff(Index i, Index j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Index> row_ptr(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : col_idx_) ++row_ptr[c + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<Index> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<Index> col_idx(nnz());
  std::vector<double> values(nnz());
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Index dst = next[col_idx_[k]]++;
      col_idx[dst] = i;
      values[dst] = values_[k];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::block(Index r0, Index r1, Index c0, Index c1) const {
  if (r0 < 0 || r1 < r0 || r1 > rows_ || c0 < 0 || c1 < c0 || c1 > cols_) {
    throw std::out_of_range("CsrMatrix::block: range outside matrix");
  }
  std::vector<Index> row_ptr{0};
  std::vector<Index> col_idx;
  std::vector<double> values;
  row_ptr.reserve(static_cast<std::size_t>(r1 - r0) + 1);
  for (Index i = r0; i < r1; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Index c = col_idx_[k];
      if (c >= c0 && c < c1) {
        col_idx.push_back(c - c0);
        values.push_back(values_[k]);
      }
    }
    row_ptr.push_back(static_cast<Index>(col_idx.size()));
  }
  return CsrMatrix(r1 - r0, c1 - c0, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
  const auto ap = a.row_ptr();
  const auto ac = a.col_idx();
  const auto av = a.values();
  const auto bp = b.row_ptr();
  const auto bc = b.col_idx();
  const auto bv = b.values();

  std::vector<Index> row_ptr{0};
  row_ptr.reserve(static_cast<std::size_t>(a.rows()) + 1);
  std::vector<Index> col_idx;
  std::vector<double> values;
  std::vector<Index> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<Index> cols_in_row;

  for (Index i = 0; i < a.rows(); ++i) {
    cols_in_row.clear();
    for (Index ka = ap[i]; ka < ap[i + 1]; ++ka) {
      const Index j = ac[ka];
      const double aij = av[ka];
      for (Index kb = bp[j]; kb < bp[j + 1]; ++kb) {
        const Index c = bc[kb];
        if (marker[c] != i) {
          marker[c] = i;
          acc[c] = 0.0;
          cols_in_row.push_back(c);
        }
        acc[c] += aij * bv[kb];
      }
    }
    std::sort(cols_in_row.begin(), cols_in_row.end());
    for (Index c : cols_in_row) {
      col_idx.push_back(c);
      values.push_back(acc[c]);
    }
    row_ptr.push_back(static_cast<Index>(col_idx.size()));
  }
  return CsrMatrix(a.rows(), b.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix galerkin_product(const CsrMatrix& p, const CsrMatrix& a) {
  if (a.rows() != a.cols() || a.cols() != p.rows()) {
    throw std::invalid_argument("galerkin_product: dimension mismatch");
  }
  const CsrMatrix c = multiply(p.transpose(), multiply(a, p));
  // Rounding in the two products leaves an O(eps) asymmetry; average it out.
  const CsrMatrix ct = c.transpose();
  if (!std::equal(c.row_ptr().begin(), c.row_ptr().end(), ct.row_ptr().begin())) return c;
  std::vector<double> v(c.values().begin(), c.values().end());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (c.col_idx()[k] != ct.col_idx()[k]) return c;
    v[k] = 0.5 * (v[k] + ct.values()[k]);
  }
  return CsrMatrix(c.rows(), c.cols(), std::vector<Index>(c.row_ptr().begin(), c.row_ptr().end()),
                   std::vector<Index>(c.col_idx().begin(), c.col_idx().end()), std::move(v));
}

double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_difference: dimension mismatch");
  }
  double m = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ap = a.row_ptr();
    const auto bp = b.row_ptr();
    Index ka = ap[i], kb = bp[i];
    while (ka < ap[i + 1] || kb < bp[i + 1]) {
      const Index ca = ka < ap[i + 1] ? a.col_idx()[ka] : a.cols();
      const Index cb = kb < bp[i + 1] ? b.col_idx()[kb] : b.cols();
      double d;
      if (ca == cb) {
        d = a.values()[ka++] - b.values()[kb++];
      } else if (ca < cb) {
        d = a.values()[ka++];
      } else {
        d = b.values()[kb++];
      }
      m = std::max(m, std::abs(d));
    }
  }
  return m;
}

double max_asymmetry(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("max_asymmetry: matrix not square");
  return max_abs_difference(a, a.transpose());
}

void write_matrix_market(const CsrMatrix& a, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      os << i + 1 << ' ' << a.col_idx()[k] + 1 << ' ' << a.values()[k] << '\n';
    }
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace wgmg
