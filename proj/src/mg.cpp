#include "wgmg/mg.hpp"

#include <stdexcept>
#include <string>

namespace wgmg {

void PreconditionerConfig::validate() const {
  if (sweeps < 1 || pre_smoothing < 1 || post_smoothing < 1) {
    throw std::invalid_argument("PreconditionerConfig: smoothing counts must be at least 1");
  }
  if (coarsest_max_dofs < 1) throw std::invalid_argument("PreconditionerConfig: coarsest size must be positive");
  if (!(jacobi_damping > 0.0 && jacobi_damping < 2.0)) {
    throw std::invalid_argument("PreconditionerConfig: Jacobi damping must lie in (0, 2)");
  }
}

Smoother::Smoother(const CsrMatrix& m, SmootherKind kind, double damping) : m_(&m), kind_(kind), damping_(damping) {
  if (m.rows() != m.cols()) throw std::invalid_argument("Smoother: matrix is not square");
  inv_diag_ = m.diagonal();
  for (std::size_t i = 0; i < inv_diag_.size(); ++i) {
    if (inv_diag_[i] == 0.0) throw std::runtime_error("Smoother: zero diagonal entry in row " + std::to_string(i));
    inv_diag_[i] = 1.0 / inv_diag_[i];
  }
}

void Smoother::sweep(std::span<const double> b, std::span<double> x, bool forward) const {
  const auto ptr = m_->row_ptr();
  const auto col = m_->col_idx();
  const auto val = m_->values();
  const Index n = m_->rows();
  if (kind_ == SmootherKind::Jacobi) {
    std::vector<double> r(static_cast<std::size_t>(n));
    m_->residual(b, x, r);
    for (Index i = 0; i < n; ++i) x[i] += damping_ * inv_diag_[i] * r[i];
    return;
  }
  auto relax = [&](Index i) {
    double s = b[i];
    for (Index k = ptr[i]; k < ptr[i + 1]; ++k) s -= val[k] * x[col[k]];
    x[i] += s * inv_diag_[i];
  };
  if (forward) {
    for (Index i = 0; i < n; ++i) relax(i);
  } else {
    for (Index i = n - 1; i >= 0; --i) relax(i);
  }
}

void Smoother::apply(std::span<const double> r, std::span<double> z, int sweeps) const {
  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < sweeps; ++s) {
    sweep(r, z, true);
    sweep(r, z, false);
  }
}

void sgs_apply(const CsrMatrix& m, std::span<const double> r, std::span<double> z, int sweeps) {
  if (sweeps < 1) throw std::invalid_argument("sgs_apply: at least one sweep");
  Smoother(m, SmootherKind::SymmetricGaussSeidel).apply(r, z, sweeps);
}

std::vector<double> sgs_apply(const CsrMatrix& m, std::span<const double> r, int sweeps) {
  std::vector<double> z(r.size());
  sgs_apply(m, r, z, sweeps);
  return z;
}

P1Hierarchy::P1Hierarchy(P1Hierarchy&&) noexcept = default;
P1Hierarchy& P1Hierarchy::operator=(P1Hierarchy&&) noexcept = default;
P1Hierarchy::~P1Hierarchy() = default;

CsrMatrix p1_interpolation(const std::vector<ParentVertex>& parents, const P1Space& coarse, const P1Space& fine) {
  if (parents.size() != fine.free_index.size()) {
    throw std::invalid_argument("p1_interpolation: parent map does not match the fine vertex count");
  }
  std::vector<Triplet> t;
  for (std::size_t v = 0; v < parents.size(); ++v) {
    const Index row = fine.free_index[v];
    const ParentVertex& p = parents[v];
    if (!p.is_midpoint()) {
      const Index col = coarse.free_index[p.first];
      if ((row < 0) != (col < 0)) {
        throw std::runtime_error("p1_interpolation: vertex " + std::to_string(v) +
                                 " changes Dirichlet status under refinement");
      }
      if (row >= 0) t.push_back({row, col, 1.0});
      continue;
    }
    if (row < 0) continue;
    for (Index end : {p.first, p.second}) {
      const Index col = coarse.free_index[end];
      if (col >= 0) t.push_back({row, col, 0.5});
    }
  }
  return CsrMatrix::from_triplets(fine.n_free, coarse.n_free, t);
}

P1Hierarchy build_p1_hierarchy(CsrMatrix fine, const MeshHierarchy& meshes, const PreconditionerConfig& config) {
  config.validate();
  const int nlev = meshes.num_levels();
  if (nlev < 1) throw std::invalid_argument("build_p1_hierarchy: empty mesh hierarchy");
  std::vector<P1Space> spaces;
  spaces.reserve(static_cast<std::size_t>(nlev));
  for (const auto& m : meshes.levels) spaces.push_back(P1Space::build(m));
  if (fine.rows() != spaces.back().n_free || fine.cols() != fine.rows()) {
    throw std::invalid_argument("build_p1_hierarchy: fine matrix does not match the free vertices of the finest mesh");
  }

  // Walk down from the finest level until the problem is small enough or the
  // next coarser space is empty.
  int coarsest = nlev - 1;
  while (coarsest > 0 && spaces[coarsest].n_free > config.coarsest_max_dofs && spaces[coarsest - 1].n_free > 0) {
    --coarsest;
  }

  P1Hierarchy h;
  h.config_ = config;
  const int used = nlev - coarsest;
  h.matrices_.resize(static_cast<std::size_t>(used));
  h.interpolations_.resize(static_cast<std::size_t>(used - 1));
  h.matrices_.back() = std::move(fine);
  for (int l = used - 2; l >= 0; --l) {
    const int mesh_level = coarsest + l;
    h.interpolations_[l] = p1_interpolation(meshes.parents[mesh_level], spaces[mesh_level], spaces[mesh_level + 1]);
    h.matrices_[l] = galerkin_product(h.interpolations_[l], h.matrices_[l + 1]);
  }
  h.smoothers_.reserve(static_cast<std::size_t>(used));
  for (int l = 0; l < used; ++l) {
    // Level 0 is solved exactly and needs no smoother.
    h.smoothers_.push_back(l == 0 ? Smoother() : Smoother(h.matrices_[l], config.smoother, config.jacobi_damping));
  }

  const CsrMatrix& c = h.matrices_.front();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(c.rows(), c.cols());
  for (Index i = 0; i < c.rows(); ++i)
    for (Index k = c.row_ptr()[i]; k < c.row_ptr()[i + 1]; ++k) dense(i, c.col_idx()[k]) = c.values()[k];
  h.coarse_.compute(dense);
  if (c.rows() > 0 && h.coarse_.info() != Eigen::Success) {
    throw std::runtime_error("build_p1_hierarchy: coarsest matrix is not positive definite");
  }
  if (config.exact_aux_solve) h.exact_ = std::make_unique<DirectSolver>(h.matrices_.back());
  return h;
}

void P1Hierarchy::cycle(int level, std::span<const double> r, std::span<double> z) const {
  if (level == 0) {
    if (r.empty()) return;
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Index>(r.size()));
    Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Index>(z.size())) = coarse_.solve(rv);
    return;
  }
  const CsrMatrix& m = matrices_[level];
  const CsrMatrix& p = interpolations_[level - 1];
  const Smoother& s = smoothers_[level];
  std::fill(z.begin(), z.end(), 0.0);
  for (int k = 0; k < config_.pre_smoothing; ++k) s.sweep(r, z, true);
  std::vector<double> res(r.size());
  m.residual(r, z, res);
  const std::vector<double> rc = p.multiply_transpose(res);
  std::vector<double> zc(rc.size());
  cycle(level - 1, rc, zc);
  const std::vector<double> corr = p.multiply(zc);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += corr[i];
  // Backward sweeps make the cycle the adjoint of itself.
  for (int k = 0; k < config_.post_smoothing; ++k) s.sweep(r, z, false);
}

void P1Hierarchy::v_cycle(std::span<const double> r, std::span<double> z) const {
  if (r.size() != static_cast<std::size_t>(size()) || z.size() != r.size()) {
    throw std::invalid_argument("P1Hierarchy::v_cycle: dimension mismatch");
  }
  if (exact_) {
    exact_->solve(r, z);
    return;
  }
  cycle(num_levels() - 1, r, z);
}

std::vector<double> P1Hierarchy::v_cycle(std::span<const double> r) const {
  std::vector<double> z(r.size());
  v_cycle(r, z);
  return z;
}

AuxiliarySpacePreconditioner::AuxiliarySpacePreconditioner(const CsrMatrix& a, CsrMatrix pi, P1Hierarchy hierarchy,
                                                           const PreconditionerConfig& config)
    : a_(&a), pi_(std::move(pi)), hierarchy_(std::move(hierarchy)), config_(config) {
  config_.validate();
  if (pi_.rows() != a.rows() || pi_.cols() != hierarchy_.size()) {
    throw std::invalid_argument("AuxiliarySpacePreconditioner: prolongation does not match the system or hierarchy");
  }
  smoother_ = Smoother(a, config_.smoother, config_.jacobi_damping);
}

void AuxiliarySpacePreconditioner::coarse_correction(std::span<const double> r, std::span<double> z) const {
  const std::vector<double> rc = pi_.multiply_transpose(r);
  const std::vector<double> zc = hierarchy_.v_cycle(rc);
  pi_.multiply(zc, z);
}

void AuxiliarySpacePreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = r.size();
  if (n != static_cast<std::size_t>(size()) || z.size() != n) {
    throw std::invalid_argument("AuxiliarySpacePreconditioner::apply: dimension mismatch");
  }
  std::vector<double> tmp(n), res(n);
  if (config_.mode == PreconditionerMode::Additive) {
    smoother_.apply(r, z, config_.sweeps);
    coarse_correction(r, tmp);
    for (std::size_t i = 0; i < n; ++i) z[i] += tmp[i];
    return;
  }
  smoother_.apply(r, z, config_.sweeps);
  a_->residual(r, z, res);
  coarse_correction(res, tmp);
  for (std::size_t i = 0; i < n; ++i) z[i] += tmp[i];
  a_->residual(r, z, res);
  smoother_.apply(res, tmp, config_.sweeps);
  for (std::size_t i = 0; i < n; ++i) z[i] += tmp[i];
}

std::vector<double> AuxiliarySpacePreconditioner::apply(std::span<const double> r) const {
  std::vector<double> z(r.size());
  apply(r, z);
  return z;
}

LinearOperator AuxiliarySpacePreconditioner::as_operator() const {
  return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
}

AuxiliarySpacePreconditioner make_preconditioner(const CsrMatrix& a, CsrMatrix pi, const MeshHierarchy& meshes,
                                                 const PreconditionerConfig& config) {
  P1Hierarchy h = build_p1_hierarchy(aux_matrix(a, pi), meshes, config);
  return AuxiliarySpacePreconditioner(a, std::move(pi), std::move(h), config);
}

}  // namespace wgmg
