#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <memory>
#include <span>
#include <vector>

#include "wgmg/mesh.hpp"
#include "wgmg/solver.hpp"
#include "wgmg/sparse.hpp"
#include "wgmg/transfer.hpp"

namespace wgmg {

enum class PreconditionerMode { Additive, Multiplicative };
enum class SmootherKind { SymmetricGaussSeidel, Jacobi };

struct PreconditionerConfig {
  PreconditionerMode mode = PreconditionerMode::Multiplicative;
  SmootherKind smoother = SmootherKind::SymmetricGaussSeidel;
  /// Smoother applications in R.
  int sweeps = 1;
  /// V-cycle smoothing steps per level.
  int pre_smoothing = 1;
  int post_smoothing = 1;
  /// The cycle stops coarsening at the first level with at most this many dofs.
  Index coarsest_max_dofs = 64;
  double jacobi_damping = 0.8;
  /// Replace the V-cycle by a sparse direct solve of the auxiliary problem.
  bool exact_aux_solve = false;

  void validate() const;
};

/// Symmetric Gauss-Seidel or damped Jacobi on a fixed SPD matrix.
class Smoother {
 public:
  Smoother() = default;
  Smoother(const CsrMatrix& m, SmootherKind kind, double damping = 0.8);

  /// x += one forward (or backward) Gauss-Seidel sweep for M x = b; Jacobi ignores the direction.
  void sweep(std::span<const double> b, std::span<double> x, bool forward) const;
  /// z = R r: `sweeps` symmetric steps from z = 0.
  void apply(std::span<const double> r, std::span<double> z, int sweeps) const;

 private:
  const CsrMatrix* m_ = nullptr;
  SmootherKind kind_ = SmootherKind::SymmetricGaussSeidel;
  double damping_ = 0.8;
  std::vector<double> inv_diag_;
};

/// z = R r for the symmetric Gauss-Seidel operator of M. Throws on a zero diagonal.
void sgs_apply(const CsrMatrix& m, std::span<const double> r, std::span<double> z, int sweeps = 1);
std::vector<double> sgs_apply(const CsrMatrix& m, std::span<const double> r, int sweeps = 1);

/// Nested P1 spaces on the free vertices, finest level last.
class P1Hierarchy {
 public:
  P1Hierarchy() = default;
  P1Hierarchy(const P1Hierarchy&) = delete;
  P1Hierarchy& operator=(const P1Hierarchy&) = delete;
  P1Hierarchy(P1Hierarchy&&) noexcept;
  P1Hierarchy& operator=(P1Hierarchy&&) noexcept;
  ~P1Hierarchy();

  int num_levels() const { return static_cast<int>(matrices_.size()); }
  Index size() const { return matrices_.empty() ? 0 : matrices_.back().rows(); }
  const CsrMatrix& matrix(int level) const { return matrices_[level]; }
  /// Maps level `level` into level `level + 1`.
  const CsrMatrix& interpolation(int level) const { return interpolations_[level]; }

  /// One V-cycle for the finest matrix, z = B r.
  void v_cycle(std::span<const double> r, std::span<double> z) const;
  std::vector<double> v_cycle(std::span<const double> r) const;

  friend P1Hierarchy build_p1_hierarchy(CsrMatrix fine, const MeshHierarchy& meshes,
                                        const PreconditionerConfig& config);

 private:
  void cycle(int level, std::span<const double> r, std::span<double> z) const;

  PreconditionerConfig config_;
  std::vector<CsrMatrix> matrices_;
  std::vector<CsrMatrix> interpolations_;
  std::vector<Smoother> smoothers_;
  Eigen::LLT<Eigen::MatrixXd> coarse_;
  std::unique_ptr<DirectSolver> exact_;
};

/// P1 interpolation from coarse free vertices to fine free vertices.
CsrMatrix p1_interpolation(const std::vector<ParentVertex>& parents, const P1Space& coarse, const P1Space& fine);

/// `fine` lives on the free vertices of meshes.finest(). Coarse matrices are
/// Galerkin products; the coarsest is factored densely.
P1Hierarchy build_p1_hierarchy(CsrMatrix fine, const MeshHierarchy& meshes, const PreconditionerConfig& config);

/// B = R + Pi Bc Pi^T (additive) or the symmetric product
/// I - B A = (I - R A)(I - Pi Bc Pi^T A)(I - R A) (multiplicative).
class AuxiliarySpacePreconditioner {
 public:
  /// `a` must outlive the preconditioner.
  AuxiliarySpacePreconditioner(const CsrMatrix& a, CsrMatrix pi, P1Hierarchy hierarchy,
                               const PreconditionerConfig& config);

  Index size() const { return a_->rows(); }
  void apply(std::span<const double> r, std::span<double> z) const;
  std::vector<double> apply(std::span<const double> r) const;
  LinearOperator as_operator() const;

  const CsrMatrix& prolongation() const { return pi_; }
  const P1Hierarchy& hierarchy() const { return hierarchy_; }
  const PreconditionerConfig& config() const { return config_; }

 private:
  void coarse_correction(std::span<const double> r, std::span<double> z) const;

  const CsrMatrix* a_;
  CsrMatrix pi_;
  P1Hierarchy hierarchy_;
  PreconditionerConfig config_;
  Smoother smoother_;
};

/// Builds aux_matrix(a, pi) and its hierarchy, then the preconditioner.
AuxiliarySpacePreconditioner make_preconditioner(const CsrMatrix& a, CsrMatrix pi, const MeshHierarchy& meshes,
                                                 const PreconditionerConfig& config);

}  // namespace wgmg
