#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wgmg/mesh.hpp"

namespace wgmg {

using Matrix3 = Eigen::Matrix3d;

/// Symmetric diffusion tensor A(x). Only the leading dim x dim block is used.
class CoefficientField {
 public:
  enum class Kind { Constant, PerRegion, Smooth };

  static CoefficientField constant(double a);
  static CoefficientField constant(const Matrix3& a);
  /// a(x) I with a taking values[region] on cells of that region.
  static CoefficientField per_region(std::vector<double> values);
  static CoefficientField smooth(std::function<double(const Point&)> a,
                                 std::optional<std::pair<double, double>> bounds = std::nullopt);
  static CoefficientField smooth_tensor(std::function<Matrix3(const Point&)> a);

  Kind kind() const { return kind_; }
  /// Constant on every cell, so exact closed-form integration applies.
  bool cellwise_constant() const { return kind_ != Kind::Smooth; }
  Matrix3 evaluate(const Point& x, int region) const;
  /// (alpha, beta) when known.
  const std::optional<std::pair<double, double>>& bounds() const { return bounds_; }

 private:
  Kind kind_ = Kind::Constant;
  std::function<Matrix3(const Point&, int)> eval_;
  std::optional<std::pair<double, double>> bounds_;
};

/// Throws if the leading dim x dim block of `a` is not symmetric positive definite.
void check_spd_coefficient(const Matrix3& a, int dim);

}  // namespace wgmg
