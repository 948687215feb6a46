#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace ranslab {

using Point = std::array<double, 2>;

/// Boundary marker registry used by the generated meshes and the mesh file format.
namespace markers {
inline constexpr int wall = 1;
inline constexpr int inlet = 2;
inline constexpr int outlet = 3;
inline constexpr int symmetry = 4;
}  // namespace markers

struct Facet {
  std::array<int, 2> vertices;
  int marker = 0;
  int cell = -1;
  int local_edge = -1;  // edge of `cell` opposite local vertex `local_edge`
  int edge = -1;
};

/// Immutable triangle mesh with marked boundary facets.
class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
       std::vector<std::pair<std::array<int, 2>, int>> facets);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<Facet>& facets() const { return facets_; }
  /// Unique edges as sorted vertex pairs, in lexicographic order.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  /// Local edge k of a cell is the edge opposite local vertex k.
  const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Sorted vertex indices touched by facets carrying `marker`.
  std::vector<int> marked_vertices(int marker) const;
  /// Sorted edge indices of facets carrying `marker`.
  std::vector<int> marked_edges(int marker) const;
  bool has_marker(int marker) const;
  /// Largest bounding-box side.
  double extent() const;
  std::array<Point, 2> bounding_box() const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Structured half-channel [0,length]x[0,height] split into 2*nx*ny triangles.
/// `grading` is the ratio of the largest to the smallest wall-normal cell size,
/// geometrically refined toward y = 0.
Mesh generate_channel_mesh(int nx, int ny, double length = 1.0, double height = 1.0,
                           double grading = 1.0);

/// Wall-normal vertex ordinates used by generate_channel_mesh.
std::vector<double> channel_ordinates(int ny, double height, double grading);

struct PeriodicMap {
  std::vector<std::pair<int, int>> pairs;  // (master, slave)
  Point translation{0.0, 0.0};
};

PeriodicMap build_periodic_map(const Mesh& mesh, int inlet_marker, int outlet_marker);

struct CellGeometry {
  std::array<std::array<double, 2>, 2> J;     // columns are edge vectors v1-v0, v2-v0
  std::array<std::array<double, 2>, 2> Jinv;
  double detJ = 0.0;
  double h = 0.0;  // longest edge
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

/// Plain-text mesh format, see docs/mesh_format.md.
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

}  // namespace ranslab
