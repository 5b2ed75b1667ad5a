#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "wgmg/coefficient.hpp"
#include "wgmg/mesh.hpp"
#include "wgmg/sparse.hpp"

namespace wgmg {

/// Dense local matrices are at most 5x5 (tetrahedron: 4 facet + 1 interior dof).
using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 5, 5>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 5, 1>;

/// Free dofs of the lowest-order space: one per non-Dirichlet facet followed
/// by one per cell.
struct WgDofLayout {
  Index n_facet_dofs = 0;
  Index n_interior_dofs = 0;
  /// -1 on Dirichlet facets.
  std::vector<Index> facet_dof;

  static WgDofLayout build(const SimplicialMesh& mesh);
  Index interior_dof(Index cell) const { return n_facet_dofs + cell; }
  Index size() const { return n_facet_dofs + n_interior_dofs; }
};

/// A WG function {v_0, v_b}: `values` in layout order, `boundary_values` holds
/// the prescribed average on every Dirichlet facet (indexed by facet).
struct WgVector {
  std::vector<double> values;
  std::vector<double> boundary_values;
};

/// Unpacked WG function: one value per cell and one per facet.
struct WgFunction {
  std::vector<double> cell;
  std::vector<double> facet;
};

WgFunction unpack(const SimplicialMesh& mesh, const WgDofLayout& layout, const WgVector& v);

struct CellGeometry {
  int dim = 2;
  std::array<Point, 4> vertices{};
  /// Measure of the facet opposite each vertex.
  std::array<double, 4> facet_measures{};
  double volume = 0.0;
};

CellGeometry cell_geometry(const SimplicialMesh& mesh, Index cell);

/// Discrete weak gradient on one simplex. The RT0 basis function attached to
/// facet i is phi_i(x) = scale_i (x - p_i), p_i the opposite vertex, with outward
/// normal component 1 on facet i. Local dof order: facet values
/// (facet opposite vertex 0..d), then the interior value.
struct LocalWeakGradient {
  int dim = 2;
  std::array<double, 4> scale{};
  std::array<Point, 4> apex{};
  /// Gram matrix (phi_j, phi_i)_K.
  LocalMatrix rt_mass;
  /// (d+1) x (d+2): local dofs -> RT0 coefficients.
  LocalMatrix gradient;

  int num_dofs() const { return dim + 2; }
  /// sum_i c_i phi_i(x)
  Eigen::Vector3d evaluate(const LocalVector& coefficients, const Point& x) const;
};

LocalWeakGradient local_weak_gradient(const CellGeometry& geometry);

/// (A grad_w u, grad_w v)_K on the local dofs. Cellwise-constant coefficients
/// are integrated in closed form; otherwise a rule of degree `quad_order` is used.
LocalMatrix local_stiffness(const CellGeometry& geometry, const LocalWeakGradient& op,
                            const CoefficientField& coefficient, int region, int quad_order);

using ScalarFunction = std::function<double(const Point&)>;
/// Dirichlet data g(x) on facets carrying the given Dirichlet tag.
using BoundaryFunction = std::function<double(const Point&, int tag)>;

struct DiffusionProblem {
  CoefficientField coefficient = CoefficientField::constant(1.0);
  ScalarFunction source = [](const Point&) { return 0.0; };
  BoundaryFunction dirichlet = [](const Point&, int) { return 0.0; };
};

struct AssemblyOptions {
  /// Degree for variable coefficients, the load and boundary averages.
  int quad_order = 4;
};

/// Assembled system on the free dofs, ordered [facet; interior].
struct WgSystem {
  WgDofLayout layout;
  CsrMatrix matrix;
  /// (f, v_0) in interior rows.
  std::vector<double> load;
  /// -A_{free, Dirichlet} g
  std::vector<double> lifting;
  std::vector<double> rhs;
  /// Facet average of g on Dirichlet facets, zero elsewhere.
  std::vector<double> dirichlet_values;

  WgVector to_wg_vector(std::vector<double> values) const { return {std::move(values), dirichlet_values}; }
};

WgSystem assemble(const SimplicialMesh& mesh, const DiffusionProblem& problem, const AssemblyOptions& options = {});

/// Facet average of g on every Dirichlet facet.
std::vector<double> dirichlet_facet_values(const SimplicialMesh& mesh, const BoundaryFunction& g, int quad_order);

struct DiscreteNorms {
  /// ||v||_{0,h}
  double l2_h = 0.0;
  /// |v|_{1,h}
  double h1_h = 0.0;
  /// ||grad_w v||
  double weak_gradient = 0.0;
};

/// h is the per-cell diameter.
DiscreteNorms discrete_norms(const SimplicialMesh& mesh, const WgFunction& v);
DiscreteNorms discrete_norms(const SimplicialMesh& mesh, const WgDofLayout& layout, const WgVector& v);

/// (A grad_w v, grad_w v)^{1/2}
double energy_norm(const SimplicialMesh& mesh, const CoefficientField& coefficient, const WgFunction& v,
                   int quad_order = 4);

/// Exact solution data for convergence studies.
struct ManufacturedSolution {
  ScalarFunction u;
  ScalarFunction f;
};

/// Q_h u: cell and facet averages of u.
WgFunction project(const SimplicialMesh& mesh, const ScalarFunction& u, int quad_order = 6);

struct ManufacturedData {
  DiffusionProblem problem;
  WgFunction projection;
};

/// Problem with source f and Dirichlet data u on every Dirichlet facet, plus Q_h u.
ManufacturedData apply_manufactured(const SimplicialMesh& mesh, const ManufacturedSolution& exact,
                                    const CoefficientField& coefficient, int quad_order = 6);

/// Barycentric point -> physical coordinates.
Point map_point(const CellGeometry& g, const std::array<double, 4>& bary, int simplex_dim);

}  // namespace wgmg
