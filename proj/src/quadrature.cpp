#include "wgmg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wgmg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule conical_product_rule(int k, int degree) {
  if (k < 1 || k > 3) throw std::invalid_argument("conical_product_rule: simplex dim must be 1..3");
  const int n = std::max(1, (degree + k + 1) / 2 + 1);
  std::vector<double> t, w;
  gauss_legendre(n, t, w);

  QuadratureRule rule{k, degree, {}, {}};
  if (k == 1) {
    for (int i = 0; i < n; ++i) {
      rule.points.push_back({1.0 - t[i], t[i], 0.0, 0.0});
      rule.weights.push_back(w[i]);
    }
    return rule;
  }
  if (k == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = t[i];
        const double y = t[j] * (1.0 - t[i]);
        rule.points.push_back({1.0 - x - y, x, y, 0.0});
        rule.weights.push_back(2.0 * w[i] * w[j] * (1.0 - t[i]));
      }
    return rule;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double x = t[i];
        const double y = t[j] * (1.0 - t[i]);
        const double z = t[l] * (1.0 - t[i]) * (1.0 - t[j]);
        rule.points.push_back({1.0 - x - y - z, x, y, z});
        rule.weights.push_back(6.0 * w[i] * w[j] * w[l] * (1.0 - t[i]) * (1.0 - t[i]) * (1.0 - t[j]));
      }
  return rule;
}

QuadratureRule simplex_rule(int k, int degree) {
  if (k < 1 || k > 3) throw std::invalid_argument("simplex_rule: simplex dim must be 1..3");
  if (degree < 0) throw std::invalid_argument("simplex_rule: negative degree");
  QuadratureRule rule{k, degree, {}, {}};
  if (degree <= 1) {
    const double c = 1.0 / (k + 1);
    rule.points.push_back({c, c, k >= 2 ? c : 0.0, k == 3 ? c : 0.0});
    rule.weights.push_back(1.0);
    return rule;
  }
  if (k == 2 && degree == 2) {
    const double a = 1.0 / 6.0, b = 2.0 / 3.0;
    rule.points = {{b, a, a, 0.0}, {a, b, a, 0.0}, {a, a, b, 0.0}};
    rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return rule;
  }
  if (k == 2 && degree <= 4) {
    // Dunavant degree-4, 6 points.
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      rule.points.push_back({b, a, a, 0.0});
      rule.points.push_back({a, b, a, 0.0});
      rule.points.push_back({a, a, b, 0.0});
      rule.weights.insert(rule.weights.end(), 3, w);
    }
    return rule;
  }
  if (k == 3 && degree == 2) {
    const double a = 0.1381966011250105, b = 0.5854101966249685;
    rule.points = {{b, a, a, a}, {a, b, a, a}, {a, a, b, a}, {a, a, a, b}};
    rule.weights = {0.25, 0.25, 0.25, 0.25};
    return rule;
  }
  return conical_product_rule(k, degree);
}

}  // namespace wgmg
