#pragma once

#include <vector>

#include "fcfv/mesh.hpp"

namespace fcfv {

struct FaceGeometry {
  double area = 0.0;
  Point centroid = Point::Zero();
  /// Outward with respect to the cell the geometry was computed for.
  Point normal = Point::Zero();
};

struct CellGeometry {
  double volume = 0.0;
  Point centroid = Point::Zero();
  /// Cell diameter: largest distance between two vertices.
  double diameter = 0.0;
  /// Ratio of the longest to the shortest cell edge.
  double stretch = 1.0;
  std::vector<FaceGeometry> faces;
};

struct MeshGeometry {
  std::vector<CellGeometry> cells;
  /// Largest cell diameter.
  double h = 0.0;
  /// Largest per-cell stretch.
  double stretching = 1.0;

  const CellGeometry& cell(Index e) const { return cells[static_cast<std::size_t>(e)]; }
};

FaceGeometry face_geometry(int nsd, const std::vector<Point>& pts);

/// Throws DegenerateCellError on non-positive volume or face measure and
/// MeshError on a non-planar quadrilateral face.
CellGeometry cell_geometry(int nsd, CellType type, const std::vector<Point>& pts, Index id = -1);

MeshGeometry compute_geometry(const Mesh& mesh);

/// Largest vertex deviation from the best-fit plane over the face diameter.
double planarity_defect(const std::vector<Point>& pts);

/// Largest planarity defect over all quadrilateral faces of a 3D mesh (0 in 2D).
double max_planarity_defect(const Mesh& mesh);

/// Edges (vertex pairs) of a cell type, derived from its faces.
std::vector<std::pair<int, int>> local_edges(CellType type);

/// Shortest edge over the whole mesh.
double min_edge_length(const Mesh& mesh);

inline constexpr double kPlanarityTolerance = 1e-10;

}  // namespace fcfv
