#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcfv/types.hpp"

namespace fcfv {

enum class CellType : std::uint8_t { Tri, Qua, Tet, Hex, Pri, Pyr };

enum class BoundaryTag : std::uint8_t { Interior, Dirichlet, Neumann };

std::string_view to_string(CellType type);
std::string_view to_string(BoundaryTag tag);
CellType cell_type_from_string(std::string_view name);
BoundaryTag boundary_tag_from_string(std::string_view name);

/// Spatial dimension of a cell type.
int dimension(CellType type);
int vertex_count(CellType type);

/// Local faces of a reference cell, each listed so that the right-hand rule
/// gives the outward normal (counter-clockwise edges in 2D).
///
/// TRI (0,1,2) and QUA (0,1,2,3) are counter-clockwise. TET (0,1,2,3) has
/// (v1-v0)x(v2-v0).(v3-v0) > 0. HEX has base 0-3 counter-clockwise seen from
/// the top face 4-7. PRI has base triangle 0-2 counter-clockwise seen from the
/// top triangle 3-5. PYR has base 0-3 counter-clockwise seen from apex 4.
std::span<const std::vector<int>> local_faces(CellType type);

struct Cell {
  CellType type;
  std::vector<Index> verts;
};

/// Mesh face (edge in 2D). Vertices are ordered outward with respect to `left`.
struct Face {
  std::vector<Index> verts;
  Index left = -1;
  Index right = -1;
  int left_local = -1;
  int right_local = -1;
  BoundaryTag tag = BoundaryTag::Interior;

  bool is_boundary() const noexcept { return right < 0; }
};

/// Geometric description handed to boundary rules for each boundary face.
struct BoundaryFaceInfo {
  std::span<const Index> verts;
  Point centroid;
  Point normal;
};

using BoundaryRule = std::function<BoundaryTag(const BoundaryFaceInfo&)>;

/// Every boundary face is Dirichlet.
BoundaryTag all_dirichlet(const BoundaryFaceInfo&);

/// Neumann on the plane x_axis = value, Dirichlet elsewhere.
BoundaryRule neumann_on_plane(int axis, double value, double tol = 1e-12);

class Mesh {
public:
  Mesh() = default;

  /// Builds the face list from the cells. Boundary faces are tagged with `rule`.
  Mesh(int nsd, std::vector<Point> vertices, std::vector<Cell> cells,
       const BoundaryRule& rule = all_dirichlet);

  int nsd() const noexcept { return nsd_; }
  Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const noexcept { return static_cast<Index>(cells_.size()); }
  Index num_faces() const noexcept { return static_cast<Index>(faces_.size()); }

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }

  const Point& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const Cell& cell(Index e) const { return cells_[static_cast<std::size_t>(e)]; }
  const Face& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }

  /// Global face index of each local face of cell e, in local_faces() order.
  std::span<const Index> cell_faces(Index e) const;

  std::vector<Point> cell_points(Index e) const;

  /// Vertex coordinates of local face j of cell e, ordered outward for e.
  std::vector<Point> local_face_points(Index e, int j) const;

  /// Copy of this mesh with boundary faces re-tagged.
  Mesh with_boundary(const BoundaryRule& rule) const;

  /// Copy with new vertex coordinates and identical topology and tags.
  Mesh with_vertices(std::vector<Point> vertices) const;

  /// Boundary tag of local face j of cell e.
  BoundaryTag local_tag(Index e, int j) const { return face(cell_faces(e)[j]).tag; }

  bool is_dirichlet(Index e, int j) const { return local_tag(e, j) == BoundaryTag::Dirichlet; }
  bool is_neumann(Index e, int j) const { return local_tag(e, j) == BoundaryTag::Neumann; }

  Index num_boundary_faces() const;

private:
  void build_faces();
  void apply_rule(const BoundaryRule& rule);

  int nsd_ = 2;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<Index> cell_face_offsets_;
  std::vector<Index> cell_face_ids_;
};

}  // namespace fcfv
