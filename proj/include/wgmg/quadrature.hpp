#pragma once

#include <array>
#include <vector>

namespace wgmg {

/// Quadrature on a k-simplex in barycentric coordinates; weights sum to one,
/// so integrals are sum_q w_q f(x_q) times the simplex measure.
struct QuadratureRule {
  int simplex_dim = 0;
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for polynomials of total degree <= `degree` on a k-simplex
/// (k = 1, 2, 3). Uses symmetric tables for low degrees and a collapsed
/// Gauss-Legendre product otherwise.
QuadratureRule simplex_rule(int simplex_dim, int degree);

/// Collapsed (Duffy) Gauss-Legendre product rule of the given degree.
QuadratureRule conical_product_rule(int simplex_dim, int degree);

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace wgmg
