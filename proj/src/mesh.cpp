#include "fcfv/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

const std::vector<std::vector<int>> kTriFaces{{0, 1}, {1, 2}, {2, 0}};
const std::vector<std::vector<int>> kQuaFaces{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
const std::vector<std::vector<int>> kTetFaces{{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
const std::vector<std::vector<int>> kHexFaces{{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                              {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
const std::vector<std::vector<int>> kPriFaces{
    {0, 2, 1}, {3, 4, 5}, {0, 1, 4, 3}, {1, 2, 5, 4}, {2, 0, 3, 5}};
const std::vector<std::vector<int>> kPyrFaces{
    {0, 3, 2, 1}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};

using FaceKey = std::array<Index, 4>;

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (Index v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

FaceKey make_key(const std::vector<Index>& verts) {
  FaceKey key{-1, -1, -1, -1};
  std::copy(verts.begin(), verts.end(), key.begin());
  std::sort(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(verts.size()));
  return key;
}

Point outward_normal(int nsd, const std::vector<Point>& pts) {
  if (nsd == 2) {
    const Point t = pts[1] - pts[0];
    return Point(t.y(), -t.x(), 0.0).normalized();
  }
  if (pts.size() == 3) {
    return (pts[1] - pts[0]).cross(pts[2] - pts[0]).normalized();
  }
  return (pts[2] - pts[0]).cross(pts[3] - pts[1]).normalized();
}

}  // namespace

std::string_view to_string(CellType type) {
  switch (type) {
    case CellType::Tri: return "TRI";
    case CellType::Qua: return "QUA";
    case CellType::Tet: return "TET";
    case CellType::Hex: return "HEX";
    case CellType::Pri: return "PRI";
    case CellType::Pyr: return "PYR";
  }
  return "?";
}

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Interior: return "INTERIOR";
    case BoundaryTag::Dirichlet: return "DIRICHLET";
    case BoundaryTag::Neumann: return "NEUMANN";
  }
  return "?";
}

CellType cell_type_from_string(std::string_view name) {
  for (CellType t : {CellType::Tri, CellType::Qua, CellType::Tet, CellType::Hex, CellType::Pri,
                     CellType::Pyr}) {
    if (to_string(t) == name) return t;
  }
  throw MeshError("unknown cell type '" + std::string(name) + "'");
}

BoundaryTag boundary_tag_from_string(std::string_view name) {
  for (BoundaryTag t : {BoundaryTag::Interior, BoundaryTag::Dirichlet, BoundaryTag::Neumann}) {
    if (to_string(t) == name) return t;
  }
  throw MeshError("unknown boundary tag '" + std::string(name) + "'");
}

int dimension(CellType type) {
  return (type == CellType::Tri || type == CellType::Qua) ? 2 : 3;
}

int vertex_count(CellType type) {
  switch (type) {
    case CellType::Tri: return 3;
    case CellType::Qua: return 4;
    case CellType::Tet: return 4;
    case CellType::Hex: return 8;
    case CellType::Pri: return 6;
    case CellType::Pyr: return 5;
  }
  return 0;
}

std::span<const std::vector<int>> local_faces(CellType type) {
  switch (type) {
    case CellType::Tri: return kTriFaces;
    case CellType::Qua: return kQuaFaces;
    case CellType::Tet: return kTetFaces;
    case CellType::Hex: return kHexFaces;
    case CellType::Pri: return kPriFaces;
    case CellType::Pyr: return kPyrFaces;
  }
  return {};
}

BoundaryTag all_dirichlet(const BoundaryFaceInfo&) { return BoundaryTag::Dirichlet; }

BoundaryRule neumann_on_plane(int axis, double value, double tol) {
  return [axis, value, tol](const BoundaryFaceInfo& info) {
    return std::abs(info.centroid[axis] - value) <= tol &&
                   std::abs(std::abs(info.normal[axis]) - 1.0) <= 1e-8
               ? BoundaryTag::Neumann
               : BoundaryTag::Dirichlet;
  };
}

Mesh::Mesh(int nsd, std::vector<Point> vertices, std::vector<Cell> cells, const BoundaryRule& rule)
    : nsd_(nsd), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (nsd_ != 2 && nsd_ != 3) throw MeshError("nsd must be 2 or 3");
  build_faces();
  apply_rule(rule);
}

void Mesh::build_faces() {
  const Index nv = num_vertices();
  std::unordered_map<FaceKey, Index, FaceKeyHash> lookup;
  lookup.reserve(cells_.size() * 4);
  cell_face_offsets_.assign(1, 0);
  cell_face_ids_.clear();
  faces_.clear();

  for (Index e = 0; e < num_cells(); ++e) {
    const Cell& c = cells_[static_cast<std::size_t>(e)];
    if (dimension(c.type) != nsd_) {
      throw MeshError("cell " + std::to_string(e) + " of type " + std::string(to_string(c.type)) +
                      " does not match nsd = " + std::to_string(nsd_));
    }
    if (static_cast<int>(c.verts.size()) != vertex_count(c.type)) {
      throw MeshError("cell " + std::to_string(e) + " has " + std::to_string(c.verts.size()) +
                      " vertices, expected " + std::to_string(vertex_count(c.type)));
    }
    for (Index v : c.verts) {
      if (v < 0 || v >= nv) {
        throw MeshError("cell " + std::to_string(e) + " references missing vertex " +
                        std::to_string(v));
      }
    }
    const auto templates = local_faces(c.type);
    for (int j = 0; j < static_cast<int>(templates.size()); ++j) {
      std::vector<Index> fv;
      fv.reserve(templates[j].size());
      for (int lv : templates[j]) fv.push_back(c.verts[static_cast<std::size_t>(lv)]);
      const FaceKey key = make_key(fv);
      auto [it, inserted] = lookup.try_emplace(key, num_faces());
      if (inserted) {
        Face f;
        f.verts = std::move(fv);
        f.left = e;
        f.left_local = j;
        faces_.push_back(std::move(f));
      } else {
        Face& f = faces_[static_cast<std::size_t>(it->second)];
        if (f.right >= 0) {
          throw MeshError("face shared by more than two cells (cells " + std::to_string(f.left) +
                          ", " + std::to_string(f.right) + ", " + std::to_string(e) + ")");
        }
        if (f.left == e) throw MeshError("cell " + std::to_string(e) + " repeats a face");
        f.right = e;
        f.right_local = j;
      }
      cell_face_ids_.push_back(it->second);
    }
    cell_face_offsets_.push_back(static_cast<Index>(cell_face_ids_.size()));
  }
}

void Mesh::apply_rule(const BoundaryRule& rule) {
  for (Face& f : faces_) {
    if (!f.is_boundary()) {
      f.tag = BoundaryTag::Interior;
      continue;
    }
    std::vector<Point> pts;
    pts.reserve(f.verts.size());
    Point centroid = Point::Zero();
    for (Index v : f.verts) {
      pts.push_back(vertex(v));
      centroid += vertex(v);
    }
    centroid /= static_cast<double>(f.verts.size());
    const BoundaryFaceInfo info{f.verts, centroid, outward_normal(nsd_, pts)};
    f.tag = rule(info);
    if (f.tag == BoundaryTag::Interior) {
      throw MeshError("boundary rule returned INTERIOR for a boundary face");
    }
  }
}

std::span<const Index> Mesh::cell_faces(Index e) const {
  const auto begin = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(e)]);
  const auto end = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(e) + 1]);
  return std::span<const Index>(cell_face_ids_).subspan(begin, end - begin);
}

std::vector<Point> Mesh::cell_points(Index e) const {
  const Cell& c = cell(e);
  std::vector<Point> pts;
  pts.reserve(c.verts.size());
  for (Index v : c.verts) pts.push_back(vertex(v));
  return pts;
}

std::vector<Point> Mesh::local_face_points(Index e, int j) const {
  const Cell& c = cell(e);
  const auto& tmpl = local_faces(c.type)[static_cast<std::size_t>(j)];
  std::vector<Point> pts;
  pts.reserve(tmpl.size());
  for (int lv : tmpl) pts.push_back(vertex(c.verts[static_cast<std::size_t>(lv)]));
  return pts;
}

Mesh Mesh::with_boundary(const BoundaryRule& rule) const {
  Mesh copy = *this;
  copy.apply_rule(rule);
  return copy;
}

Mesh Mesh::with_vertices(std::vector<Point> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw MeshError("with_vertices: vertex count mismatch");
  }
  Mesh copy = *this;
  copy.vertices_ = std::move(vertices);
  return copy;
}

Index Mesh::num_boundary_faces() const {
  return static_cast<Index>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.is_boundary(); }));
}

}  // namespace fcfv
