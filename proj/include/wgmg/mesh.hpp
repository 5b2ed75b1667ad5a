#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wgmg/sparse.hpp"

namespace wgmg {

/// Coordinates; unused trailing components are zero in 2D.
using Point = std::array<double, 3>;
/// Vertex ids of a simplex; the first dim+1 entries are used.
using Cell = std::array<Index, 4>;
/// Sorted vertex ids of a facet; the first dim entries are used.
using FacetVertices = std::array<Index, 3>;

enum class BoundaryKind : std::uint8_t { Interior, Unlabeled, Dirichlet, Neumann };

struct FacetLabel {
  BoundaryKind kind = BoundaryKind::Interior;
  int tag = 0;

  static FacetLabel dirichlet(int tag = 0) { return {BoundaryKind::Dirichlet, tag}; }
  static FacetLabel neumann(int tag = 0) { return {BoundaryKind::Neumann, tag}; }
  bool is_dirichlet() const { return kind == BoundaryKind::Dirichlet; }
  friend bool operator==(const FacetLabel&, const FacetLabel&) = default;
};

struct FacetTable {
  std::vector<FacetVertices> vertices;
  /// Adjacent cells; the second entry is -1 on the boundary.
  std::vector<std::array<Index, 2>> cells;
  /// cell_facets[c][i] is the facet of cell c opposite its local vertex i.
  std::vector<std::array<Index, 4>> cell_facets;

  Index size() const { return static_cast<Index>(vertices.size()); }
  bool is_boundary(Index f) const { return cells[f][1] < 0; }
};

/// Enumerates the (d-1)-subsimplices of `cells` in lexicographic order of
/// their sorted vertex tuples. Throws on a facet shared by three or more cells.
FacetTable build_facets(int dim, std::span<const Cell> cells);

/// Conforming triangle/tetrahedron mesh with facet adjacency, boundary labels
/// and per-cell region ids. Cells must be positively oriented.
class SimplicialMesh {
 public:
  SimplicialMesh() = default;
  SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells, std::vector<int> regions = {});

  int dim() const { return dim_; }
  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }
  Index num_facets() const { return facets_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(Index v) const { return vertices_[v]; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(Index c) const { return cells_[c]; }
  const FacetTable& facets() const { return facets_; }
  const std::vector<FacetLabel>& facet_labels() const { return labels_; }
  const FacetLabel& facet_label(Index f) const { return labels_[f]; }
  const std::vector<int>& cell_regions() const { return regions_; }
  int cell_region(Index c) const { return regions_[c]; }

  /// Boundary facets must receive a non-Interior label, interior facets Interior.
  void set_facet_labels(std::vector<FacetLabel> labels);
  bool fully_labeled() const;

  /// Same topology and labels, new coordinates. Throws if a cell inverts.
  SimplicialMesh with_vertices(std::vector<Point> vertices) const;

  double cell_volume(Index c) const;
  double facet_measure(Index f) const;
  double cell_diameter(Index c) const;
  Point cell_centroid(Index c) const;
  Point facet_centroid(Index f) const;
  double total_volume() const;
  /// circumradius / inradius of cell c.
  double shape_ratio(Index c) const;
  double max_shape_ratio() const;

  Index num_boundary_facets() const;
  /// Vertices lying on at least one Dirichlet facet.
  std::vector<bool> dirichlet_vertices() const;

 private:
  void validate_cells() const;

  int dim_ = 2;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<int> regions_;
  FacetTable facets_;
  std::vector<FacetLabel> labels_;
};

double signed_volume(int dim, std::span<const Point> simplex);
double simplex_measure(int dim_of_simplex, std::span<const Point> simplex);

/// Returns the label for a boundary facet given its centroid, or nullopt when
/// the facet is not covered by the marker.
using BoundaryMarker = std::function<std::optional<FacetLabel>(const Point&)>;

/// Labels boundary facets through `marker`; interior facets get Interior.
/// Throws when a boundary facet stays unlabeled or the facet set has no boundary.
std::vector<FacetLabel> classify_boundary(const SimplicialMesh& mesh, const BoundaryMarker& marker);
std::vector<FacetLabel> classify_boundary(int dim, const FacetTable& facets, std::span<const Point> vertices,
                                          const BoundaryMarker& marker);

/// Origin of a vertex after refinement: an inherited vertex has second == -1,
/// an edge midpoint stores both endpoints of the parent edge.
struct ParentVertex {
  Index first = -1;
  Index second = -1;
  bool is_midpoint() const { return second >= 0; }
};

struct Refinement {
  SimplicialMesh mesh;
  std::vector<ParentVertex> parents;
};

/// Regular refinement: 4 children per triangle, 8 per tetrahedron. In 3D the
/// inner octahedron is split along its shortest diagonal (ties broken by the
/// smaller pair of midpoint ids). Labels and region ids are inherited.
Refinement refine_uniform(const SimplicialMesh& mesh);

/// Moves a newly created boundary vertex onto the curved boundary.
using SnapHook = std::function<void(Point&)>;

struct MeshHierarchy {
  std::vector<SimplicialMesh> levels;
  /// parents[l] maps vertices of levels[l + 1] to vertices of levels[l].
  std::vector<std::vector<ParentVertex>> parents;
  /// snapped[l][v] marks vertices of levels[l + 1] moved by the snap hook.
  std::vector<std::vector<bool>> snapped;

  int num_levels() const { return static_cast<int>(levels.size()); }
  const SimplicialMesh& finest() const { return levels.back(); }
  /// The first `count` levels.
  MeshHierarchy prefix(int count) const;
};

MeshHierarchy build_hierarchy(const SimplicialMesh& coarse, int num_levels, const SnapHook& snap = {});

/// Plain-text mesh format:
///   dim ncells nverts
///   nverts lines of dim coordinates
///   ncells lines of dim+1 vertex ids (0-based)
///   [regions]            followed by ncells integers
///   [boundary n]         followed by n lines "v_1 .. v_dim D|N tag"
SimplicialMesh read_mesh(std::istream& is);
void write_mesh(const SimplicialMesh& mesh, std::ostream& os);

}  // namespace wgmg
