#include "wgmg/mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wgmg {
namespace {

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dist2(const Point& a, const Point& b) {
  const Point d = sub(a, b);
  return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
}

FacetVertices facet_key(int dim, const Cell& cell, int opposite) {
  FacetVertices key{-1, -1, -1};
  int k = 0;
  for (int i = 0; i <= dim; ++i) {
    if (i != opposite) key[k++] = cell[i];
  }
  std::sort(key.begin(), key.begin() + dim);
  return key;
}

std::array<Index, 4> sorted_cell(int dim, const Cell& c) {
  std::array<Index, 4> s = c;
  std::sort(s.begin(), s.begin() + dim + 1);
  if (dim == 2) s[3] = -1;
  return s;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

double signed_volume(int dim, std::span<const Point> s) {
  if (dim == 2) {
    const Point a = sub(s[1], s[0]);
    const Point b = sub(s[2], s[0]);
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  const Point a = sub(s[1], s[0]);
  const Point b = sub(s[2], s[0]);
  const Point c = sub(s[3], s[0]);
  const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                     a[2] * (b[0] * c[1] - b[1] * c[0]);
  return det / 6.0;
}

double simplex_measure(int k, std::span<const Point> s) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return std::sqrt(dist2(s[1], s[0]));
    case 2: {
      const Point a = sub(s[1], s[0]);
      const Point b = sub(s[2], s[0]);
      const double cx = a[1] * b[2] - a[2] * b[1];
      const double cy = a[2] * b[0] - a[0] * b[2];
      const double cz = a[0] * b[1] - a[1] * b[0];
      return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
    }
    case 3:
      return std::abs(signed_volume(3, s));
    default:
      throw std::invalid_argument("simplex_measure: simplex dimension must be 0..3");
  }
}

FacetTable build_facets(int dim, std::span<const Cell> cells) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_facets: dim must be 2 or 3");
  struct Entry {
    FacetVertices key;
    Index cell;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(cells.size() * static_cast<std::size_t>(dim + 1));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int i = 0; i <= dim; ++i) entries.push_back({facet_key(dim, cells[c], i), static_cast<Index>(c), i});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });

  FacetTable table;
  table.cell_facets.assign(cells.size(), {-1, -1, -1, -1});
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t end = k + 1;
    while (end < entries.size() && entries[end].key == entries[k].key) ++end;
    if (end - k > 2) {
      throw std::runtime_error("build_facets: nonmanifold facet shared by " + std::to_string(end - k) + " cells");
    }
    const Index f = table.size();
    table.vertices.push_back(entries[k].key);
    table.cells.push_back({entries[k].cell, end - k == 2 ? entries[k + 1].cell : -1});
    for (std::size_t j = k; j < end; ++j) table.cell_facets[entries[j].cell][entries[j].local] = f;
    k = end;
  }
  return table;
}

SimplicialMesh::SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells,
                               std::vector<int> regions)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)), regions_(std::move(regions)) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("SimplicialMesh: dim must be 2 or 3");
  if (regions_.empty()) regions_.assign(cells_.size(), 0);
  if (regions_.size() != cells_.size()) throw std::invalid_argument("SimplicialMesh: one region id per cell");
  for (auto& c : cells_) {
    if (dim_ == 2) c[3] = -1;
    for (int i = 0; i <= dim_; ++i) {
      if (c[i] < 0 || c[i] >= num_vertices()) throw std::out_of_range("SimplicialMesh: cell vertex id out of range");
    }
  }
  validate_cells();
  facets_ = build_facets(dim_, cells_);
  labels_.resize(facets_.vertices.size());
  for (Index f = 0; f < facets_.size(); ++f) {
    labels_[f].kind = facets_.is_boundary(f) ? BoundaryKind::Unlabeled : BoundaryKind::Interior;
  }
}

void SimplicialMesh::validate_cells() const {
  for (Index c = 0; c < num_cells(); ++c) {
    const double v = cell_volume(c);
    if (!(v > 0.0)) {
      throw std::runtime_error("SimplicialMesh: cell " + std::to_string(c) +
                               (v == 0.0 ? " has zero measure" : " is inverted"));
    }
  }
}

void SimplicialMesh::set_facet_labels(std::vector<FacetLabel> labels) {
  if (labels.size() != facets_.vertices.size()) throw std::invalid_argument("set_facet_labels: size mismatch");
  for (Index f = 0; f < facets_.size(); ++f) {
    const bool interior_label = labels[f].kind == BoundaryKind::Interior;
    if (interior_label == facets_.is_boundary(f)) {
      throw std::invalid_argument("set_facet_labels: facet " + std::to_string(f) +
                                  " label does not match its boundary status");
    }
  }
  labels_ = std::move(labels);
}

bool SimplicialMesh::fully_labeled() const {
  return std::none_of(labels_.begin(), labels_.end(),
                      [](const FacetLabel& l) { return l.kind == BoundaryKind::Unlabeled; });
}

SimplicialMesh SimplicialMesh::with_vertices(std::vector<Point> vertices) const {
  if (vertices.size() != vertices_.size()) throw std::invalid_argument("with_vertices: vertex count mismatch");
  SimplicialMesh m = *this;
  m.vertices_ = std::move(vertices);
  m.validate_cells();
  return m;
}

double SimplicialMesh::cell_volume(Index c) const {
  std::array<Point, 4> p;
  for (int i = 0; i <= dim_; ++i) p[i] = vertices_[cells_[c][i]];
  return signed_volume(dim_, std::span<const Point>(p.data(), dim_ + 1));
}

double SimplicialMesh::facet_measure(Index f) const {
  std::array<Point, 3> p;
  for (int i = 0; i < dim_; ++i) p[i] = vertices_[facets_.vertices[f][i]];
  return simplex_measure(dim_ - 1, std::span<const Point>(p.data(), dim_));
}

double SimplicialMesh::cell_diameter(Index c) const {
  double d2 = 0.0;
  for (int i = 0; i <= dim_; ++i)
    for (int j = i + 1; j <= dim_; ++j) d2 = std::max(d2, dist2(vertices_[cells_[c][i]], vertices_[cells_[c][j]]));
  return std::sqrt(d2);
}

Point SimplicialMesh::cell_centroid(Index c) const {
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i <= dim_; ++i)
    for (int k = 0; k < 3; ++k) x[k] += vertices_[cells_[c][i]][k];
  for (double& v : x) v /= (dim_ + 1);
  return x;
}

Point SimplicialMesh::facet_centroid(Index f) const {
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < 3; ++k) x[k] += vertices_[facets_.vertices[f][i]][k];
  for (double& v : x) v /= dim_;
  return x;
}

double SimplicialMesh::total_volume() const {
  double v = 0.0;
  for (Index c = 0; c < num_cells(); ++c) v += cell_volume(c);
  return v;
}

double SimplicialMesh::shape_ratio(Index c) const {
  const Cell& cell = cells_[c];
  double boundary = 0.0;
  for (int i = 0; i <= dim_; ++i) boundary += facet_measure(facets_.cell_facets[c][i]);
  const double inradius = dim_ * cell_volume(c) / boundary;

  Eigen::MatrixXd m(dim_, dim_);
  Eigen::VectorXd rhs(dim_);
  const Point& p0 = vertices_[cell[0]];
  for (int i = 0; i < dim_; ++i) {
    const Point e = sub(vertices_[cell[i + 1]], p0);
    for (int k = 0; k < dim_; ++k) m(i, k) = 2.0 * e[k];
    rhs(i) = dist2(vertices_[cell[i + 1]], p0);
  }
  const Eigen::VectorXd center = m.partialPivLu().solve(rhs);
  return center.norm() / inradius;
}

double SimplicialMesh::max_shape_ratio() const {
  double r = 0.0;
  for (Index c = 0; c < num_cells(); ++c) r = std::max(r, shape_ratio(c));
  return r;
}

Index SimplicialMesh::num_boundary_facets() const {
  Index n = 0;
  for (Index f = 0; f < facets_.size(); ++f) n += facets_.is_boundary(f) ? 1 : 0;
  return n;
}

std::vector<bool> SimplicialMesh::dirichlet_vertices() const {
  std::vector<bool> mark(vertices_.size(), false);
  for (Index f = 0; f < facets_.size(); ++f) {
    if (!labels_[f].is_dirichlet()) continue;
    for (int i = 0; i < dim_; ++i) mark[facets_.vertices[f][i]] = true;
  }
  return mark;
}

std::vector<FacetLabel> classify_boundary(int dim, const FacetTable& facets, std::span<const Point> vertices,
                                          const BoundaryMarker& marker) {
  std::vector<FacetLabel> labels(facets.vertices.size());
  Index boundary = 0;
  for (Index f = 0; f < facets.size(); ++f) {
    if (!facets.is_boundary(f)) continue;
    ++boundary;
    Point x{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < 3; ++k) x[k] += vertices[facets.vertices[f][i]][k] / dim;
    const auto label = marker(x);
    if (!label || label->kind == BoundaryKind::Interior || label->kind == BoundaryKind::Unlabeled) {
      throw std::runtime_error("classify_boundary: boundary facet " + std::to_string(f) + " left unlabeled");
    }
    labels[f] = *label;
  }
  if (boundary == 0) throw std::runtime_error("classify_boundary: mesh has no boundary facets");
  return labels;
}

std::vector<FacetLabel> classify_boundary(const SimplicialMesh& mesh, const BoundaryMarker& marker) {
  return classify_boundary(mesh.dim(), mesh.facets(), mesh.vertices(), marker);
}

Refinement refine_uniform(const SimplicialMesh& mesh) {
  const int dim = mesh.dim();
  const Index nv = mesh.num_vertices();

  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(static_cast<std::size_t>(mesh.num_cells()) * (dim == 2 ? 3 : 6));
  for (const Cell& c : mesh.cells()) {
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) edges.emplace_back(std::min(c[i], c[j]), std::max(c[i], c[j]));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  auto midpoint_id = [&](Index a, Index b) {
    const std::pair<Index, Index> e{std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(edges.begin(), edges.end(), e);
    return nv + static_cast<Index>(it - edges.begin());
  };

  std::vector<Point> vertices = mesh.vertices();
  std::vector<ParentVertex> parents(static_cast<std::size_t>(nv) + edges.size());
  for (Index v = 0; v < nv; ++v) parents[v] = {v, -1};
  vertices.reserve(parents.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Point& a = mesh.vertex(edges[e].first);
    const Point& b = mesh.vertex(edges[e].second);
    vertices.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])});
    parents[nv + e] = {edges[e].first, edges[e].second};
  }

  std::vector<Cell> children;
  std::vector<int> regions;
  children.reserve(static_cast<std::size_t>(mesh.num_cells()) * (dim == 2 ? 4 : 8));
  regions.reserve(children.capacity());

  auto push_oriented = [&](Cell c, int region) {
    std::array<Point, 4> p;
    for (int i = 0; i <= dim; ++i) p[i] = vertices[c[i]];
    if (signed_volume(dim, std::span<const Point>(p.data(), dim + 1)) < 0.0) std::swap(c[0], c[1]);
    children.push_back(c);
    regions.push_back(region);
  };

  for (Index ci = 0; ci < mesh.num_cells(); ++ci) {
    const Cell& c = mesh.cell(ci);
    const int region = mesh.cell_region(ci);
    Index m[4][4];
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) m[i][j] = m[j][i] = midpoint_id(c[i], c[j]);

    if (dim == 2) {
      push_oriented({c[0], m[0][1], m[0][2], -1}, region);
      push_oriented({m[0][1], c[1], m[1][2], -1}, region);
      push_oriented({m[0][2], m[1][2], c[2], -1}, region);
      push_oriented({m[0][1], m[1][2], m[0][2], -1}, region);
      continue;
    }

    push_oriented({c[0], m[0][1], m[0][2], m[0][3]}, region);
    push_oriented({m[0][1], c[1], m[1][2], m[1][3]}, region);
    push_oriented({m[0][2], m[1][2], c[2], m[2][3]}, region);
    push_oriented({m[0][3], m[1][3], m[2][3], c[3]}, region);

    // Octahedron diagonals (a,b)-(c,d) for the three pairings of local vertices.
    constexpr int pairing[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    int best = -1;
    double best_len = 0.0;
    std::pair<Index, Index> best_ids{};
    for (int k = 0; k < 3; ++k) {
      const auto [a, b, cc, d] = pairing[k];
      const Index p = m[a][b];
      const Index q = m[cc][d];
      const double len = dist2(vertices[p], vertices[q]);
      const std::pair<Index, Index> ids{std::min(p, q), std::max(p, q)};
      const double tol = 1e-12 * std::max(len, best_len);
      if (best < 0 || len < best_len - tol || (std::abs(len - best_len) <= tol && ids < best_ids)) {
        best = k;
        best_len = len;
        best_ids = ids;
      }
    }
    const auto [a, b, cc, d] = pairing[best];
    const Index p = m[a][b];
    const Index q = m[cc][d];
    // Equator cycle around the diagonal: ac - ad - bd - bc.
    const Index ring[4] = {m[a][cc], m[a][d], m[b][d], m[b][cc]};
    for (int k = 0; k < 4; ++k) push_oriented({p, q, ring[k], ring[(k + 1) % 4]}, region);
  }

  // Canonical cell order: lexicographic in sorted vertex ids.
  std::vector<Index> order(children.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::array<Index, 4>> keys(children.size());
  for (std::size_t k = 0; k < children.size(); ++k) keys[k] = sorted_cell(dim, children[k]);
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return keys[x] < keys[y]; });
  std::vector<Cell> cells(children.size());
  std::vector<int> cell_regions(children.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    cells[k] = children[order[k]];
    cell_regions[k] = regions[order[k]];
  }

  SimplicialMesh fine(dim, std::move(vertices), std::move(cells), std::move(cell_regions));

  // A child boundary facet lies in the parent facet spanned by the union of
  // its vertices' parents.
  const auto& coarse_facets = mesh.facets().vertices;
  std::vector<FacetLabel> labels(static_cast<std::size_t>(fine.num_facets()));
  for (Index f = 0; f < fine.num_facets(); ++f) {
    if (!fine.facets().is_boundary(f)) continue;
    std::vector<Index> span;
    for (int i = 0; i < dim; ++i) {
      const ParentVertex& pv = parents[fine.facets().vertices[f][i]];
      span.push_back(pv.first);
      if (pv.is_midpoint()) span.push_back(pv.second);
    }
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end()), span.end());
    FacetVertices key{-1, -1, -1};
    if (static_cast<int>(span.size()) != dim) throw std::logic_error("refine_uniform: boundary facet has no parent");
    std::copy(span.begin(), span.end(), key.begin());
    const auto it = std::lower_bound(coarse_facets.begin(), coarse_facets.end(), key);
    if (it == coarse_facets.end() || *it != key) throw std::logic_error("refine_uniform: parent facet not found");
    labels[f] = mesh.facet_label(static_cast<Index>(it - coarse_facets.begin()));
  }
  fine.set_facet_labels(std::move(labels));
  return {std::move(fine), std::move(parents)};
}

MeshHierarchy MeshHierarchy::prefix(int count) const {
  if (count < 1 || count > num_levels()) throw std::out_of_range("MeshHierarchy::prefix: bad level count");
  MeshHierarchy h;
  h.levels.assign(levels.begin(), levels.begin() + count);
  h.parents.assign(parents.begin(), parents.begin() + (count - 1));
  h.snapped.assign(snapped.begin(), snapped.begin() + (count - 1));
  return h;
}

MeshHierarchy build_hierarchy(const SimplicialMesh& coarse, int num_levels, const SnapHook& snap) {
  if (num_levels < 1) throw std::invalid_argument("build_hierarchy: need at least one level");
  MeshHierarchy h;
  h.levels.push_back(coarse);
  for (int l = 1; l < num_levels; ++l) {
    Refinement r = refine_uniform(h.levels.back());
    std::vector<bool> moved(static_cast<std::size_t>(r.mesh.num_vertices()), false);
    if (snap) {
      std::vector<bool> on_boundary(moved.size(), false);
      const auto& ft = r.mesh.facets();
      for (Index f = 0; f < ft.size(); ++f) {
        if (!ft.is_boundary(f)) continue;
        for (int i = 0; i < r.mesh.dim(); ++i) on_boundary[ft.vertices[f][i]] = true;
      }
      std::vector<Point> vertices = r.mesh.vertices();
      for (Index v = 0; v < r.mesh.num_vertices(); ++v) {
        if (on_boundary[v] && r.parents[v].is_midpoint()) {
          snap(vertices[v]);
          moved[v] = true;
        }
      }
      r.mesh = r.mesh.with_vertices(std::move(vertices));
    }
    h.levels.push_back(std::move(r.mesh));
    h.parents.push_back(std::move(r.parents));
    h.snapped.push_back(std::move(moved));
  }
  return h;
}

SimplicialMesh read_mesh(std::istream& is) {
  int dim = 0;
  long ncells = 0;
  long nverts = 0;
  if (!(is >> dim >> ncells >> nverts) || (dim != 2 && dim != 3) || ncells < 0 || nverts < 0) {
    throw std::runtime_error("read_mesh: bad header");
  }
  std::vector<Point> vertices(static_cast<std::size_t>(nverts), Point{0.0, 0.0, 0.0});
  for (auto& p : vertices) {
    for (int k = 0; k < dim; ++k) {
      std::string tok;
      if (!(is >> tok)) throw std::runtime_error("read_mesh: truncated vertex section");
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), p[k]);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw std::runtime_error("read_mesh: bad coordinate '" + tok + "'");
      }
    }
  }
  std::vector<Cell> cells(static_cast<std::size_t>(ncells), Cell{-1, -1, -1, -1});
  for (auto& c : cells) {
    for (int k = 0; k <= dim; ++k) {
      if (!(is >> c[k])) throw std::runtime_error("read_mesh: truncated cell section");
    }
  }
  std::vector<int> regions;
  std::vector<std::pair<FacetVertices, FacetLabel>> boundary;
  std::string section;
  while (is >> section) {
    if (section == "regions") {
      regions.resize(cells.size());
      for (int& r : regions) {
        if (!(is >> r)) throw std::runtime_error("read_mesh: truncated regions section");
      }
    } else if (section == "boundary") {
      long n = 0;
      if (!(is >> n) || n < 0) throw std::runtime_error("read_mesh: bad boundary count");
      for (long k = 0; k < n; ++k) {
        FacetVertices key{-1, -1, -1};
        for (int i = 0; i < dim; ++i) {
          if (!(is >> key[i])) throw std::runtime_error("read_mesh: truncated boundary section");
        }
        std::sort(key.begin(), key.begin() + dim);
        std::string kind;
        int tag = 0;
        if (!(is >> kind >> tag) || (kind != "D" && kind != "N")) {
          throw std::runtime_error("read_mesh: bad boundary label");
        }
        boundary.push_back({key, kind == "D" ? FacetLabel::dirichlet(tag) : FacetLabel::neumann(tag)});
      }
    } else {
      throw std::runtime_error("read_mesh: unknown section '" + section + "'");
    }
  }
  SimplicialMesh mesh(dim, std::move(vertices), std::move(cells), std::move(regions));
  if (!boundary.empty()) {
    std::vector<FacetLabel> labels = mesh.facet_labels();
    const auto& fv = mesh.facets().vertices;
    for (const auto& [key, label] : boundary) {
      const auto it = std::lower_bound(fv.begin(), fv.end(), key);
      if (it == fv.end() || *it != key) throw std::runtime_error("read_mesh: boundary entry is not a facet");
      const auto f = static_cast<Index>(it - fv.begin());
      if (!mesh.facets().is_boundary(f)) throw std::runtime_error("read_mesh: labeled facet is interior");
      labels[f] = label;
    }
    mesh.set_facet_labels(std::move(labels));
  }
  return mesh;
}

void write_mesh(const SimplicialMesh& mesh, std::ostream& os) {
  const int dim = mesh.dim();
  std::string out;
  out += std::to_string(dim) + ' ' + std::to_string(mesh.num_cells()) + ' ' + std::to_string(mesh.num_vertices()) +
         '\n';
  for (const Point& p : mesh.vertices()) {
    for (int k = 0; k < dim; ++k) {
      if (k) out += ' ';
      append_number(out, p[k]);
    }
    out += '\n';
  }
  for (const Cell& c : mesh.cells()) {
    for (int k = 0; k <= dim; ++k) {
      if (k) out += ' ';
      out += std::to_string(c[k]);
    }
    out += '\n';
  }
  const auto& regions = mesh.cell_regions();
  if (std::any_of(regions.begin(), regions.end(), [](int r) { return r != 0; })) {
    out += "regions\n";
    for (int r : regions) out += std::to_string(r) + '\n';
  }
  std::vector<Index> labeled;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const auto kind = mesh.facet_label(f).kind;
    if (kind == BoundaryKind::Dirichlet || kind == BoundaryKind::Neumann) labeled.push_back(f);
  }
  if (!labeled.empty()) {
    out += "boundary " + std::to_string(labeled.size()) + '\n';
    for (Index f : labeled) {
      for (int i = 0; i < dim; ++i) out += std::to_string(mesh.facets().vertices[f][i]) + ' ';
      const FacetLabel& l = mesh.facet_label(f);
      out += (l.is_dirichlet() ? "D " : "N ") + std::to_string(l.tag) + '\n';
    }
  }
  os << out;
}

}  // namespace wgmg
