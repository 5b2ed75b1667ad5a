#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wgmg/sparse.hpp"

namespace wgmg {

/// y = Op x; y has the same length as x.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

LinearOperator as_operator(const CsrMatrix& a);
LinearOperator identity_operator();

struct PcgOptions {
  double tol = 1e-8;
  int max_iterations = 1000;
  /// Singular A with the constant vector as kernel: iterate on mean-zero
  /// vectors and return the mean-zero solution.
  bool remove_constant = false;
};

struct SolveReport {
  int iterations = 0;
  /// ||b - A x_k|| / ||b|| after each step (recursive residual).
  std::vector<double> residual_history;
  /// CG step lengths and direction updates, one pair per iteration.
  std::vector<double> lanczos_alpha;
  std::vector<double> lanczos_beta;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa_estimate = 1.0;
  /// Fewer than five Lanczos steps went into the estimate.
  bool low_confidence = false;
  bool converged = false;
  /// Recomputed from scratch at exit.
  double final_true_residual = 0.0;
  /// The recursive residual had drifted from the true residual and CG was restarted.
  int restarts = 0;
  double wall_time_seconds = 0.0;
};

/// Preconditioned CG from a zero initial guess, stopped on ||b - A x|| <= tol ||b||.
/// Throws on breakdown (a non-SPD operator). When max_iterations is reached the
/// last iterate is returned with converged == false.
std::vector<double> pcg(const LinearOperator& a, const LinearOperator& b_inv, std::span<const double> rhs,
                        const PcgOptions& options, SolveReport& report);

struct ConditionEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 1.0;
  int steps = 0;
  bool low_confidence = false;
};

/// Extreme eigenvalues of the tridiagonal built from CG coefficients.
ConditionEstimate condition_estimate(std::span<const double> alpha, std::span<const double> beta);
ConditionEstimate condition_estimate(const SolveReport& report);

struct LanczosOptions {
  int max_steps = 200;
  /// Stop once both extremes move less than this (relative) in one step.
  double tol = 1e-8;
  std::uint64_t seed = 12345;
  /// Full reorthogonalization is used up to this size.
  std::int64_t reorthogonalize_up_to = 2000;
};

/// Lanczos on B A, self-adjoint in the A inner product. A must be SPD.
ConditionEstimate lanczos_extremes(const LinearOperator& a, const LinearOperator& b_inv, Index n,
                                   const LanczosOptions& options = {});

/// Sparse LDL^T factorization of a symmetric positive definite matrix.
class DirectSolver {
 public:
  DirectSolver();
  explicit DirectSolver(const CsrMatrix& a);
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;
  ~DirectSolver();

  Index size() const;
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b);

}  // namespace wgmg
