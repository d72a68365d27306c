#include "fcfv/generators.hpp"

#include <algorithm>
#include <array>

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

constexpr std::array<MeshFamily, 7> kFamilies{MeshFamily::Tri, MeshFamily::Qua, MeshFamily::Tet,
                                              MeshFamily::Hex, MeshFamily::Pri, MeshFamily::Pyr,
                                              MeshFamily::Hybrid};

struct Builder {
  std::vector<Point> verts;
  std::vector<Cell> cells;

  Index add_vertex(const Point& x) {
    verts.push_back(x);
    return static_cast<Index>(verts.size()) - 1;
  }

  // Tetrahedra are flipped to positive orientation.
  void add_tet(Index a, Index b, Index c, Index d) {
    const Point& pa = verts[static_cast<std::size_t>(a)];
    const double vol = (verts[static_cast<std::size_t>(b)] - pa)
                           .cross(verts[static_cast<std::size_t>(c)] - pa)
                           .dot(verts[static_cast<std::size_t>(d)] - pa);
    if (vol < 0) std::swap(b, c);
    cells.push_back({CellType::Tet, {a, b, c, d}});
  }

  // Pyramid whose base is a hexahedron face listed outward for that hex.
  void add_pyramid_on_face(const std::array<Index, 4>& f, Index apex) {
    cells.push_back({CellType::Pyr, {f[0], f[3], f[2], f[1], apex}});
  }
};

void build_2d(Builder& b, MeshFamily family, int n) {
  const double h = 1.0 / n;
  auto id = [n](int i, int j) { return static_cast<Index>(i + (n + 1) * j); };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) b.add_vertex(Point(i * h, j * h, 0.0));
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      const bool quad = family == MeshFamily::Qua ||
                        (family == MeshFamily::Hybrid && (i + 0.5) * h < 0.5);
      if (quad) {
        b.cells.push_back({CellType::Qua, {v00, v10, v11, v01}});
      } else {
        b.cells.push_back({CellType::Tri, {v00, v10, v11}});
        b.cells.push_back({CellType::Tri, {v00, v11, v01}});
      }
    }
  }
}

// Hexahedron corners ordered as the HEX reference cell.
using HexCorners = std::array<Index, 8>;

void add_cube(Builder& b, MeshFamily family, const HexCorners& c, bool hybrid_top) {
  switch (family) {
    case MeshFamily::Hex: b.cells.push_back({CellType::Hex, {c.begin(), c.end()}}); return;
    case MeshFamily::Tet: {
      // Kuhn split: monotone lattice paths from corner 0 to corner 6.
      static constexpr std::array<std::array<int, 4>, 6> paths{{{0, 1, 2, 6},
                                                                {0, 1, 5, 6},
                                                                {0, 3, 2, 6},
                                                                {0, 3, 7, 6},
                                                                {0, 4, 5, 6},
                                                                {0, 4, 7, 6}}};
      for (const auto& p : paths) b.add_tet(c[p[0]], c[p[1]], c[p[2]], c[p[3]]);
      return;
    }
    case MeshFamily::Pri:
      b.cells.push_back({CellType::Pri, {c[0], c[1], c[2], c[4], c[5], c[6]}});
      b.cells.push_back({CellType::Pri, {c[0], c[2], c[3], c[4], c[6], c[7]}});
      return;
    case MeshFamily::Pyr:
    case MeshFamily::Hybrid: {
      if (family == MeshFamily::Hybrid && !hybrid_top) {
        b.cells.push_back({CellType::Hex, {c.begin(), c.end()}});
        return;
      }
      Point centre = Point::Zero();
      for (Index v : c) centre += b.verts[static_cast<std::size_t>(v)];
      const Index apex = b.add_vertex(centre / 8.0);
      for (const auto& f : local_faces(CellType::Hex)) {
        const std::array<Index, 4> face{c[f[0]], c[f[1]], c[f[2]], c[f[3]]};
        const bool top = f[0] == 4;
        if (family == MeshFamily::Hybrid && top) {
          b.add_tet(face[0], face[1], face[2], apex);
          b.add_tet(face[0], face[2], face[3], apex);
        } else {
          b.add_pyramid_on_face(face, apex);
        }
      }
      return;
    }
    default: throw MeshError("family is not three-dimensional");
  }
}

void build_3d(Builder& b, MeshFamily family, int n) {
  const int nz = family == MeshFamily::Hybrid ? 2 * n : n;
  const double h = 1.0 / n;
  const double hz = 1.0 / nz;
  auto id = [n](int i, int j, int k) {
    return static_cast<Index>(i + (n + 1) * (j + (n + 1) * k));
  };
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) b.add_vertex(Point(i * h, j * h, k * hz));
    }
  }
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const HexCorners c{id(i, j, k),         id(i + 1, j, k),         id(i + 1, j + 1, k),
                           id(i, j + 1, k),     id(i, j, k + 1),         id(i + 1, j, k + 1),
                           id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
        add_cube(b, family, c, k == nz - 1);
      }
    }
  }
}

}  // namespace

std::string_view to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::Tri: return "TRI";
    case MeshFamily::Qua: return "QUA";
    case MeshFamily::Tet: return "TET";
    case MeshFamily::Hex: return "HEX";
    case MeshFamily::Pri: return "PRI";
    case MeshFamily::Pyr: return "PYR";
    case MeshFamily::Hybrid: return "HYBRID";
  }
  return "?";
}

MeshFamily mesh_family_from_string(std::string_view name) {
  for (MeshFamily f : kFamilies) {
    if (to_string(f) == name) return f;
  }
  throw MeshError("unknown cell type '" + std::string(name) + "'");
}

int family_dimension(MeshFamily family) {
  switch (family) {
    case MeshFamily::Tri:
    case MeshFamily::Qua: return 2;
    case MeshFamily::Hybrid: return 0;
    default: return 3;
  }
}

int divisions_for_level(int nsd, int level) {
  if (level < 1) throw MeshError("mesh level must be at least 1");
  if (level > 12) throw MeshError("mesh level too large");
  return nsd == 2 ? 1 << level : 1 << (level - 1);
}

Mesh generate_grid_mesh(int nsd, MeshFamily family, int n, const BoundaryRule& rule) {
  if (nsd != 2 && nsd != 3) throw MeshError("nsd must be 2 or 3");
  if (n < 1) throw MeshError("grid divisions must be positive");
  const int dim = family_dimension(family);
  if (dim != 0 && dim != nsd) {
    throw MeshError("cell type " + std::string(to_string(family)) + " is not available in " +
                    std::to_string(nsd) + "D");
  }
  Builder b;
  if (nsd == 2) {
    build_2d(b, family, n);
  } else {
    build_3d(b, family, n);
  }
  return Mesh(nsd, std::move(b.verts), std::move(b.cells), rule);
}

Mesh generate_structured_mesh(int nsd, MeshFamily family, int level, const BoundaryRule& rule) {
  return generate_grid_mesh(nsd, family, divisions_for_level(nsd, level), rule);
}

}  // namespace fcfv
