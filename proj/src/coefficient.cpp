#include "wgmg/coefficient.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace wgmg {

CoefficientField CoefficientField::constant(double a) {
  CoefficientField c;
  c.kind_ = Kind::Constant;
  c.eval_ = [a](const Point&, int) -> Matrix3 { return a * Matrix3::Identity(); };
  c.bounds_ = std::pair{a, a};
  return c;
}

CoefficientField CoefficientField::constant(const Matrix3& a) {
  CoefficientField c;
  c.kind_ = Kind::Constant;
  c.eval_ = [a](const Point&, int) { return a; };
  return c;
}

CoefficientField CoefficientField::per_region(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("CoefficientField::per_region: no region values");
  CoefficientField c;
  c.kind_ = Kind::PerRegion;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  c.bounds_ = std::pair{*lo, *hi};
  c.eval_ = [values = std::move(values)](const Point&, int region) -> Matrix3 {
    if (region < 0 || region >= static_cast<int>(values.size())) {
      throw std::out_of_range("CoefficientField: no value for region " + std::to_string(region));
    }
    return values[region] * Matrix3::Identity();
  };
  return c;
}

CoefficientField CoefficientField::smooth(std::function<double(const Point&)> a,
                                          std::optional<std::pair<double, double>> bounds) {
  CoefficientField c;
  c.kind_ = Kind::Smooth;
  c.eval_ = [a = std::move(a)](const Point& x, int) -> Matrix3 { return a(x) * Matrix3::Identity(); };
  c.bounds_ = bounds;
  return c;
}

CoefficientField CoefficientField::smooth_tensor(std::function<Matrix3(const Point&)> a) {
  CoefficientField c;
  c.kind_ = Kind::Smooth;
  c.eval_ = [a = std::move(a)](const Point& x, int) { return a(x); };
  return c;
}

Matrix3 CoefficientField::evaluate(const Point& x, int region) const { return eval_(x, region); }

void check_spd_coefficient(const Matrix3& a, int dim) {
  const Eigen::MatrixXd block = a.topLeftCorner(dim, dim);
  const double asym = (block - block.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, block.cwiseAbs().maxCoeff())) {
    throw std::runtime_error("diffusion coefficient is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() != Eigen::Success) throw std::runtime_error("diffusion coefficient is not positive definite");
}

}  // namespace wgmg
