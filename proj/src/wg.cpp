#include "wgmg/wg.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wgmg/parallel.hpp"
#include "wgmg/quadrature.hpp"

namespace wgmg {
namespace {

Eigen::Vector3d as_vec(const Point& p) { return {p[0], p[1], p[2]}; }

std::vector<Point> facet_points(const SimplicialMesh& mesh, Index f) {
  std::vector<Point> p;
  for (int i = 0; i < mesh.dim(); ++i) p.push_back(mesh.vertex(mesh.facets().vertices[f][i]));
  return p;
}

double facet_average(const std::vector<Point>& p, const QuadratureRule& rule,
                     const std::function<double(const Point&)>& g) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    Point x{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < p.size(); ++i)
      for (int k = 0; k < 3; ++k) x[k] += rule.points[q][i] * p[i][k];
    s += rule.weights[q] * g(x);
  }
  return s;
}

double cell_integral(const CellGeometry& geo, const QuadratureRule& rule, const ScalarFunction& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(map_point(geo, rule.points[q], geo.dim));
  return s * geo.volume;
}

}  // namespace

Point map_point(const CellGeometry& g, const std::array<double, 4>& bary, int simplex_dim) {
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i <= simplex_dim; ++i)
    for (int k = 0; k < 3; ++k) x[k] += bary[i] * g.vertices[i][k];
  return x;
}

WgDofLayout WgDofLayout::build(const SimplicialMesh& mesh) {
  if (!mesh.fully_labeled()) throw std::runtime_error("WgDofLayout: mesh has unlabeled boundary facets");
  WgDofLayout layout;
  layout.facet_dof.assign(static_cast<std::size_t>(mesh.num_facets()), -1);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.facet_label(f).is_dirichlet()) layout.facet_dof[f] = layout.n_facet_dofs++;
  }
  layout.n_interior_dofs = mesh.num_cells();
  return layout;
}

WgFunction unpack(const SimplicialMesh& mesh, const WgDofLayout& layout, const WgVector& v) {
  if (v.values.size() != static_cast<std::size_t>(layout.size())) {
    throw std::invalid_argument("unpack: vector length does not match layout");
  }
  WgFunction out;
  out.cell.resize(static_cast<std::size_t>(mesh.num_cells()));
  out.facet.resize(static_cast<std::size_t>(mesh.num_facets()));
  for (Index c = 0; c < mesh.num_cells(); ++c) out.cell[c] = v.values[layout.interior_dof(c)];
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const Index d = layout.facet_dof[f];
    out.facet[f] = d >= 0 ? v.values[d] : (v.boundary_values.empty() ? 0.0 : v.boundary_values[f]);
  }
  return out;
}

CellGeometry cell_geometry(const SimplicialMesh& mesh, Index cell) {
  CellGeometry g;
  g.dim = mesh.dim();
  for (int i = 0; i <= g.dim; ++i) g.vertices[i] = mesh.vertex(mesh.cell(cell)[i]);
  for (int i = 0; i <= g.dim; ++i) g.facet_measures[i] = mesh.facet_measure(mesh.facets().cell_facets[cell][i]);
  g.volume = mesh.cell_volume(cell);
  return g;
}

Eigen::Vector3d LocalWeakGradient::evaluate(const LocalVector& c, const Point& x) const {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (int i = 0; i <= dim; ++i) v += c(i) * scale[i] * (as_vec(x) - as_vec(apex[i]));
  return v;
}

LocalWeakGradient local_weak_gradient(const CellGeometry& geo) {
  const int d = geo.dim;
  const int n = d + 1;
  if (!(geo.volume > 0.0)) throw std::runtime_error("local_weak_gradient: degenerate cell");
  LocalWeakGradient op;
  op.dim = d;
  for (int i = 0; i < n; ++i) {
    op.apex[i] = geo.vertices[i];
    op.scale[i] = geo.facet_measures[i] / (d * geo.volume);
  }

  // int_K (x - a).(x - b) = |K|/((d+1)(d+2)) [ (sum_m (v_m - a)).(sum_n (v_n - b)) + sum_m (v_m - a).(v_m - b) ]
  const double factor = geo.volume / ((d + 1.0) * (d + 2.0));
  Eigen::Vector3d vsum = Eigen::Vector3d::Zero();
  for (int m = 0; m < n; ++m) vsum += as_vec(geo.vertices[m]);
  op.rt_mass.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Eigen::Vector3d a = as_vec(op.apex[i]);
      const Eigen::Vector3d b = as_vec(op.apex[j]);
      double diag = 0.0;
      for (int m = 0; m < n; ++m) diag += (as_vec(geo.vertices[m]) - a).dot(as_vec(geo.vertices[m]) - b);
      const double integral = factor * ((vsum - n * a).dot(vsum - n * b) + diag);
      op.rt_mass(i, j) = op.rt_mass(j, i) = op.scale[i] * op.scale[j] * integral;
    }
  }

  // (grad_w v, phi_i)_K = |e_i| (v_b,i - v_0)
  LocalMatrix rhs = LocalMatrix::Zero(n, n + 1);
  for (int i = 0; i < n; ++i) {
    rhs(i, i) = geo.facet_measures[i];
    rhs(i, n) = -geo.facet_measures[i];
  }
  Eigen::LLT<LocalMatrix> llt(op.rt_mass);
  if (llt.info() != Eigen::Success) throw std::runtime_error("local_weak_gradient: singular RT0 mass matrix");
  op.gradient = llt.solve(rhs);
  return op;
}

LocalMatrix local_stiffness(const CellGeometry& geo, const LocalWeakGradient& op, const CoefficientField& coeff,
                            int region, int quad_order) {
  const int d = geo.dim;
  const int n = d + 1;
  LocalMatrix weighted(n, n);
  if (coeff.cellwise_constant()) {
    Point centroid{0.0, 0.0, 0.0};
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < 3; ++k) centroid[k] += geo.vertices[m][k] / n;
    const Matrix3 a = coeff.evaluate(centroid, region);
    check_spd_coefficient(a, d);
    const double factor = geo.volume / ((d + 1.0) * (d + 2.0));
    Eigen::Vector3d vsum = Eigen::Vector3d::Zero();
    for (int m = 0; m < n; ++m) vsum += as_vec(geo.vertices[m]);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const Eigen::Vector3d pi = as_vec(op.apex[i]);
        const Eigen::Vector3d pj = as_vec(op.apex[j]);
        double diag = 0.0;
        for (int m = 0; m < n; ++m) diag += (as_vec(geo.vertices[m]) - pi).dot(a * (as_vec(geo.vertices[m]) - pj));
        const double integral = factor * ((vsum - n * pi).dot(a * (vsum - n * pj)) + diag);
        weighted(i, j) = weighted(j, i) = op.scale[i] * op.scale[j] * integral;
      }
    }
  } else {
    if (quad_order < 2) throw std::invalid_argument("local_stiffness: quadrature degree must be at least 2");
    const QuadratureRule rule = simplex_rule(d, quad_order);
    weighted.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_point(geo, rule.points[q], d);
      const Matrix3 a = coeff.evaluate(x, region);
      check_spd_coefficient(a, d);
      Eigen::Matrix<double, 3, 4> phi = Eigen::Matrix<double, 3, 4>::Zero();
      for (int i = 0; i < n; ++i) phi.col(i) = op.scale[i] * (as_vec(x) - as_vec(op.apex[i]));
      const Eigen::MatrixXd contrib = phi.leftCols(n).transpose() * a * phi.leftCols(n);
      weighted += rule.weights[q] * geo.volume * contrib;
    }
  }
  LocalMatrix k = op.gradient.transpose() * weighted * op.gradient;
  const LocalMatrix kt = k.transpose();
  return 0.5 * (k + kt);
}

std::vector<double> dirichlet_facet_values(const SimplicialMesh& mesh, const BoundaryFunction& g, int quad_order) {
  std::vector<double> values(static_cast<std::size_t>(mesh.num_facets()), 0.0);
  const QuadratureRule rule = simplex_rule(mesh.dim() - 1, quad_order);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const FacetLabel& label = mesh.facet_label(f);
    if (!label.is_dirichlet()) continue;
    values[f] = facet_average(facet_points(mesh, f), rule, [&](const Point& x) { return g(x, label.tag); });
  }
  return values;
}

WgSystem assemble(const SimplicialMesh& mesh, const DiffusionProblem& problem, const AssemblyOptions& options) {
  WgSystem sys;
  sys.layout = WgDofLayout::build(mesh);
  const WgDofLayout& layout = sys.layout;
  const Index n = layout.size();
  const int nloc = mesh.dim() + 2;
  sys.dirichlet_values = dirichlet_facet_values(mesh, problem.dirichlet, options.quad_order);
  sys.load.assign(static_cast<std::size_t>(n), 0.0);
  sys.lifting.assign(static_cast<std::size_t>(n), 0.0);

  const QuadratureRule load_rule = simplex_rule(mesh.dim(), options.quad_order);
  const int workers = worker_count();
  struct Buffer {
    std::vector<Triplet> entries;
    std::vector<std::pair<Index, double>> lifts;
  };
  std::vector<Buffer> buffers(static_cast<std::size_t>(workers));

  parallel_chunks(
      mesh.num_cells(),
      [&](long begin, long end, int w) {
        auto& buf = buffers[w];
        buf.entries.reserve(static_cast<std::size_t>(end - begin) * nloc * nloc);
        for (long cl = begin; cl < end; ++cl) {
          const auto c = static_cast<Index>(cl);
          const CellGeometry geo = cell_geometry(mesh, c);
          const LocalWeakGradient op = local_weak_gradient(geo);
          const LocalMatrix k = local_stiffness(geo, op, problem.coefficient, mesh.cell_region(c), options.quad_order);

          std::array<Index, 5> dofs{};
          std::array<double, 5> fixed{};
          bool has_dirichlet = false;
          for (int i = 0; i < nloc - 1; ++i) {
            const Index f = mesh.facets().cell_facets[c][i];
            dofs[i] = layout.facet_dof[f];
            fixed[i] = sys.dirichlet_values[f];
            has_dirichlet |= dofs[i] < 0;
          }
          dofs[nloc - 1] = layout.interior_dof(c);
          // One interior row per cell, so this write cannot race.
          sys.load[dofs[nloc - 1]] = cell_integral(geo, load_rule, problem.source);
          for (int i = 0; i < nloc; ++i) {
            if (dofs[i] < 0) continue;
            double lift = 0.0;
            for (int j = 0; j < nloc; ++j) {
              if (dofs[j] >= 0) {
                buf.entries.push_back({dofs[i], dofs[j], k(i, j)});
              } else {
                lift -= k(i, j) * fixed[j];
              }
            }
            if (has_dirichlet) buf.lifts.emplace_back(dofs[i], lift);
          }
        }
      },
      workers);

  for (const auto& b : buffers) {
    for (const auto& [row, value] : b.lifts) sys.lifting[row] += value;
  }

  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& b : buffers) total += b.entries.size();
  all.reserve(total);
  for (const auto& b : buffers) all.insert(all.end(), b.entries.begin(), b.entries.end());
  sys.matrix = CsrMatrix::from_triplets(n, n, all);

  sys.rhs.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) sys.rhs[i] = sys.load[i] + sys.lifting[i];
  return sys;
}

DiscreteNorms discrete_norms(const SimplicialMesh& mesh, const WgFunction& v) {
  DiscreteNorms out;
  double l2 = 0.0, h1 = 0.0, wg = 0.0;
  const int d = mesh.dim();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const double h = mesh.cell_diameter(c);
    const double v0 = v.cell[c];
    double jump = 0.0;
    LocalVector local(d + 2);
    for (int i = 0; i <= d; ++i) {
      const double vb = v.facet[mesh.facets().cell_facets[c][i]];
      jump += geo.facet_measures[i] * (v0 - vb) * (v0 - vb);
      local(i) = vb;
    }
    local(d + 1) = v0;
    l2 += geo.volume * v0 * v0 + h * jump;
    h1 += jump / h;
    const LocalWeakGradient op = local_weak_gradient(geo);
    const LocalVector coeffs = op.gradient * local;
    wg += coeffs.dot(op.rt_mass * coeffs);
  }
  out.l2_h = std::sqrt(l2);
  out.h1_h = std::sqrt(h1);
  out.weak_gradient = std::sqrt(std::max(wg, 0.0));
  return out;
}

DiscreteNorms discrete_norms(const SimplicialMesh& mesh, const WgDofLayout& layout, const WgVector& v) {
  return discrete_norms(mesh, unpack(mesh, layout, v));
}

double energy_norm(const SimplicialMesh& mesh, const CoefficientField& coefficient, const WgFunction& v,
                   int quad_order) {
  double e = 0.0;
  const int d = mesh.dim();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const LocalWeakGradient op = local_weak_gradient(geo);
    const LocalMatrix k = local_stiffness(geo, op, coefficient, mesh.cell_region(c), quad_order);
    LocalVector local(d + 2);
    for (int i = 0; i <= d; ++i) local(i) = v.facet[mesh.facets().cell_facets[c][i]];
    local(d + 1) = v.cell[c];
    e += local.dot(k * local);
  }
  return std::sqrt(std::max(e, 0.0));
}

WgFunction project(const SimplicialMesh& mesh, const ScalarFunction& u, int quad_order) {
  WgFunction q;
  q.cell.resize(static_cast<std::size_t>(mesh.num_cells()));
  q.facet.resize(static_cast<std::size_t>(mesh.num_facets()));
  const QuadratureRule cell_rule = simplex_rule(mesh.dim(), quad_order);
  const QuadratureRule facet_rule = simplex_rule(mesh.dim() - 1, quad_order);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    q.cell[c] = cell_integral(geo, cell_rule, u) / geo.volume;
  }
  for (Index f = 0; f < mesh.num_facets(); ++f) q.facet[f] = facet_average(facet_points(mesh, f), facet_rule, u);
  return q;
}

ManufacturedData apply_manufactured(const SimplicialMesh& mesh, const ManufacturedSolution& exact,
                                    const CoefficientField& coefficient, int quad_order) {
  ManufacturedData data;
  data.problem.coefficient = coefficient;
  data.problem.source = exact.f;
  data.problem.dirichlet = [u = exact.u](const Point& x, int) { return u(x); };
  data.projection = project(mesh, exact.u, quad_order);
  return data;
}

}  // namespace wgmg
