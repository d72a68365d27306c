#include "fcfv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/SVD>

#include "fcfv/errors.hpp"
#include "fcfv/quadrature.hpp"

namespace fcfv {

FaceGeometry face_geometry(int nsd, const std::vector<Point>& pts) {
  FaceGeometry g;
  if (nsd == 2) {
    const Point t = pts[1] - pts[0];
    g.area = t.norm();
    g.centroid = 0.5 * (pts[0] + pts[1]);
    g.normal = Point(t.y(), -t.x(), 0.0) / g.area;
    return g;
  }
  if (pts.size() == 3) {
    const Point n = (pts[1] - pts[0]).cross(pts[2] - pts[0]);
    g.area = 0.5 * n.norm();
    g.centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
    g.normal = n.normalized();
    return g;
  }
  // Planar quadrilateral: split along 0-2.
  const double a1 = 0.5 * (pts[1] - pts[0]).cross(pts[2] - pts[0]).norm();
  const double a2 = 0.5 * (pts[2] - pts[0]).cross(pts[3] - pts[0]).norm();
  g.area = a1 + a2;
  g.centroid = (a1 * (pts[0] + pts[1] + pts[2]) + a2 * (pts[0] + pts[2] + pts[3])) / (3.0 * g.area);
  g.normal = (pts[2] - pts[0]).cross(pts[3] - pts[1]).normalized();
  return g;
}

double planarity_defect(const std::vector<Point>& pts) {
  if (pts.size() <= 3) return 0.0;
  Point c = Point::Zero();
  for (const Point& x : pts) c += x;
  c /= static_cast<double>(pts.size());
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
  double diameter = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = (pts[i] - c).transpose();
    for (std::size_t k = i + 1; k < pts.size(); ++k) diameter = std::max(diameter, (pts[i] - pts[k]).norm());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::Vector3d n = svd.matrixV().col(2);
  double dev = 0.0;
  for (const Point& x : pts) dev = std::max(dev, std::abs((x - c).dot(n)));
  return diameter > 0.0 ? dev / diameter : 0.0;
}

std::vector<std::pair<int, int>> local_edges(CellType type) {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : local_faces(type)) {
    if (dimension(type) == 2) {
      edges.emplace(std::min(f[0], f[1]), std::max(f[0], f[1]));
      continue;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int a = f[i];
      const int b = f[(i + 1) % f.size()];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return {edges.begin(), edges.end()};
}

CellGeometry cell_geometry(int nsd, CellType type, const std::vector<Point>& pts, Index id) {
  CellGeometry g;
  g.volume = 0.0;
  Point weighted = Point::Zero();
  for (const Simplex& s : sub_simplices(type, pts)) {
    const double m = s.signed_measure();
    if (!(m > 0.0)) throw DegenerateCellError(id, "non-positive sub-simplex measure");
    g.volume += m;
    weighted += m * s.centroid();
  }
  g.centroid = weighted / g.volume;

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) {
      g.diameter = std::max(g.diameter, (pts[i] - pts[k]).norm());
    }
  }
  double longest = 0.0;
  double shortest = std::numeric_limits<double>::max();
  for (auto [a, b] : local_edges(type)) {
    const double len = (pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(b)]).norm();
    longest = std::max(longest, len);
    shortest = std::min(shortest, len);
  }
  g.stretch = longest / shortest;

  for (const auto& f : local_faces(type)) {
    std::vector<Point> fp;
    fp.reserve(f.size());
    for (int lv : f) fp.push_back(pts[static_cast<std::size_t>(lv)]);
    if (nsd == 3 && fp.size() == 4 && planarity_defect(fp) > kPlanarityTolerance) {
      throw MeshError("cell " + std::to_string(id) + " has a non-planar quadrilateral face");
    }
    FaceGeometry fg = face_geometry(nsd, fp);
    if (!(fg.area > 0.0)) throw DegenerateCellError(id, "zero face measure");
    g.faces.push_back(fg);
  }
  return g;
}

MeshGeometry compute_geometry(const Mesh& mesh) {
  MeshGeometry geo;
  geo.cells.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    geo.cells.push_back(cell_geometry(mesh.nsd(), mesh.cell(e).type, mesh.cell_points(e), e));
    geo.h = std::max(geo.h, geo.cells.back().diameter);
    geo.stretching = std::max(geo.stretching, geo.cells.back().stretch);
  }
  return geo;
}

double max_planarity_defect(const Mesh& mesh) {
  if (mesh.nsd() == 2) return 0.0;
  double worst = 0.0;
  for (const Face& f : mesh.faces()) {
    if (f.verts.size() != 4) continue;
    std::vector<Point> pts;
    for (Index v : f.verts) pts.push_back(mesh.vertex(v));
    worst = std::max(worst, planarity_defect(pts));
  }
  return worst;
}

double min_edge_length(const Mesh& mesh) {
  double shortest = std::numeric_limits<double>::max();
  for (const Cell& c : mesh.cells()) {
    for (auto [a, b] : local_edges(c.type)) {
      shortest = std::min(shortest, (mesh.vertex(c.verts[static_cast<std::size_t>(a)]) -
                                     mesh.vertex(c.verts[static_cast<std::size_t>(b)]))
                                        .norm());
    }
  }
  return shortest;
}

}  // namespace fcfv
