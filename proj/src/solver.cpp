#include "wgmg/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace wgmg {

LinearOperator as_operator(const CsrMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); };
}

LinearOperator identity_operator() {
  return [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
}

std::vector<double> pcg(const LinearOperator& a, const LinearOperator& b_inv, std::span<const double> rhs,
                        const PcgOptions& options, SolveReport& report) {
  const auto start = std::chrono::steady_clock::now();
  report = SolveReport{};
  const std::size_t n = rhs.size();
  std::vector<double> x(n, 0.0), r(rhs.begin(), rhs.end()), z(n), p(n), q(n);
  auto project = [&](std::span<double> v) {
    if (!options.remove_constant || n == 0) return;
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(n);
    for (double& e : v) e -= mean;
  };
  project(r);
  const std::vector<double> b(r);
  const double bnorm = norm2(b);
  if (!std::isfinite(bnorm)) throw std::invalid_argument("pcg: right-hand side is not finite");
  if (bnorm == 0.0) {
    report.converged = true;
    return x;
  }

  auto true_residual = [&] {
    a(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    return norm2(r) / bnorm;
  };

  b_inv(r, z);
  project(z);
  p = z;
  double rz = dot(r, z);
  if (!(rz > 0.0)) throw std::runtime_error("pcg: preconditioner is not positive definite");
  // Restarts only guard against loss of orthogonality; two are plenty.
  const int max_restarts = 2;
  while (report.iterations < options.max_iterations) {
    a(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw std::runtime_error("pcg: breakdown, <p, Ap> <= 0 at iteration " +
                                              std::to_string(report.iterations));
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    ++report.iterations;
    report.lanczos_alpha.push_back(alpha);
    const double rel = norm2(r) / bnorm;
    report.residual_history.push_back(rel);
    if (rel <= options.tol) {
      const double actual = true_residual();
      if (actual <= options.tol || report.restarts >= max_restarts) {
        report.converged = actual <= options.tol;
        break;
      }
      ++report.restarts;
      b_inv(r, z);
      project(z);
      p = z;
      rz = dot(r, z);
      report.lanczos_beta.push_back(0.0);
      continue;
    }
    b_inv(r, z);
    project(z);
    const double rz_next = dot(r, z);
    if (!(rz_next > 0.0)) throw std::runtime_error("pcg: preconditioner is not positive definite");
    const double beta = rz_next / rz;
    report.lanczos_beta.push_back(beta);
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  project(x);
  report.final_true_residual = true_residual();
  report.converged = report.final_true_residual <= options.tol;

  // Coefficients after a restart belong to a different Krylov space.
  std::size_t used = report.lanczos_alpha.size();
  for (std::size_t k = 0; k < report.lanczos_beta.size(); ++k) {
    if (report.lanczos_beta[k] == 0.0) {
      used = k + 1;
      break;
    }
  }
  const ConditionEstimate est = condition_estimate(std::span<const double>(report.lanczos_alpha).first(used),
                                                   std::span<const double>(report.lanczos_beta));
  report.lambda_min = est.lambda_min;
  report.lambda_max = est.lambda_max;
  report.kappa_estimate = est.kappa;
  report.low_confidence = est.low_confidence;
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return x;
}

ConditionEstimate condition_estimate(std::span<const double> alpha, std::span<const double> beta) {
  ConditionEstimate est;
  const auto m = static_cast<Index>(alpha.size());
  est.steps = m;
  est.low_confidence = m < 5;
  if (m == 0) return est;
  if (beta.size() + 1 < alpha.size()) throw std::invalid_argument("condition_estimate: too few beta coefficients");
  Eigen::VectorXd diag(m), sub(std::max<Index>(m - 1, 0));
  for (Index k = 0; k < m; ++k) {
    diag(k) = 1.0 / alpha[k] + (k > 0 ? beta[k - 1] / alpha[k - 1] : 0.0);
    if (k + 1 < m) sub(k) = std::sqrt(beta[k]) / alpha[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  est.lambda_min = eig.eigenvalues()(0);
  est.lambda_max = eig.eigenvalues()(m - 1);
  est.kappa = est.lambda_min > 0.0 ? std::max(1.0, est.lambda_max / est.lambda_min) : INFINITY;
  return est;
}

ConditionEstimate condition_estimate(const SolveReport& report) {
  return condition_estimate(report.lanczos_alpha, report.lanczos_beta);
}

ConditionEstimate lanczos_extremes(const LinearOperator& a, const LinearOperator& b_inv, Index n,
                                   const LanczosOptions& options) {
  if (n <= 0) throw std::invalid_argument("lanczos_extremes: empty operator");
  const auto size = static_cast<std::size_t>(n);
  const bool reorth = n <= options.reorthogonalize_up_to;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  std::vector<double> q(size), aq(size), s(size), t(size), at(size), q_prev(size, 0.0);
  for (double& v : q) v = dist(rng);
  a(q, aq);
  double norm = std::sqrt(dot(q, aq));
  if (!(norm > 0.0)) throw std::runtime_error("lanczos_extremes: operator is not positive definite");
  for (std::size_t i = 0; i < size; ++i) {
    q[i] /= norm;
    aq[i] /= norm;
  }

  std::vector<std::vector<double>> basis, abasis;
  std::vector<double> alphas, betas;
  ConditionEstimate est;
  double prev_min = 0.0, prev_max = 0.0;
  double beta_prev = 0.0;
  const int max_steps = static_cast<int>(std::min<Index>(options.max_steps, n));
  for (int k = 0; k < max_steps; ++k) {
    if (reorth) {
      basis.push_back(q);
      abasis.push_back(aq);
    }
    b_inv(aq, s);
    const double alpha = dot(aq, s);
    alphas.push_back(alpha);
    for (std::size_t i = 0; i < size; ++i) t[i] = s[i] - alpha * q[i] - beta_prev * q_prev[i];
    if (reorth) {
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < basis.size(); ++j) axpy(-dot(abasis[j], t), basis[j], t);
    }
    a(t, at);
    const double beta = std::sqrt(std::max(dot(t, at), 0.0));

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alphas.data(), static_cast<Index>(alphas.size()));
    Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Index>(betas.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    est.lambda_min = eig.eigenvalues()(0);
    est.lambda_max = eig.eigenvalues()(eig.eigenvalues().size() - 1);
    est.steps = k + 1;
    const bool settled = k > 4 && std::abs(est.lambda_min - prev_min) <= options.tol * std::abs(est.lambda_min) &&
                         std::abs(est.lambda_max - prev_max) <= options.tol * std::abs(est.lambda_max);
    prev_min = est.lambda_min;
    prev_max = est.lambda_max;
    if (settled || beta <= 1e-14 * std::abs(alpha)) break;

    betas.push_back(beta);
    q_prev.swap(q);
    for (std::size_t i = 0; i < size; ++i) {
      q[i] = t[i] / beta;
      aq[i] = at[i] / beta;
    }
    beta_prev = beta;
  }
  est.kappa = est.lambda_min > 0.0 ? std::max(1.0, est.lambda_max / est.lambda_min) : INFINITY;
  est.low_confidence = est.steps < 5;
  return est;
}

struct DirectSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Index n = 0;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}

DirectSolver::DirectSolver(const CsrMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("DirectSolver: matrix is not square");
  impl_->n = a.rows();
  if (a.rows() == 0) return;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) t.emplace_back(i, a.col_idx()[k], a.values()[k]);
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  impl_->ldlt.compute(m);
  if (impl_->ldlt.info() != Eigen::Success) throw std::runtime_error("DirectSolver: factorization failed");
  const auto d = impl_->ldlt.vectorD();
  if ((d.array() <= 0.0).any()) throw std::runtime_error("DirectSolver: matrix is not positive definite");
}

DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;
DirectSolver::~DirectSolver() = default;

Index DirectSolver::size() const { return impl_->n; }

void DirectSolver::solve(std::span<const double> b, std::span<double> x) const {
  if (b.size() != static_cast<std::size_t>(impl_->n) || x.size() != b.size()) {
    throw std::invalid_argument("DirectSolver::solve: dimension mismatch");
  }
  if (impl_->n == 0) return;
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), impl_->n);
  Eigen::Map<Eigen::VectorXd> xv(x.data(), impl_->n);
  xv = impl_->ldlt.solve(bv);
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b) { return DirectSolver(a).solve(b); }

}  // namespace wgmg
