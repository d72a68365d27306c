#pragma once

#include <string_view>

#include "fcfv/mesh.hpp"

namespace fcfv {

/// Structured mesh families on the unit square or cube.
enum class MeshFamily : std::uint8_t { Tri, Qua, Tet, Hex, Pri, Pyr, Hybrid };

std::string_view to_string(MeshFamily family);
MeshFamily mesh_family_from_string(std::string_view name);

/// Spatial dimension implied by a family; HYBRID has none (returns 0).
int family_dimension(MeshFamily family);

/// Grid divisions per axis for a refinement level: 2^level in 2D and
/// 2^(level-1) in 3D.
int divisions_for_level(int nsd, int level);

/// Mesh of the unit hypercube built from an n x n (x n) grid.
///
/// TRI splits each square along its (0,0)-(1,1) diagonal. TET uses the six
/// tetrahedra around the cube diagonal, PRI two prisms cut by the vertical
/// diagonal plane, PYR six pyramids with apex at the cube centre.
///
/// HYBRID in 2D uses quadrilaterals for x < 1/2 and triangles elsewhere. In
/// 3D it uses n x n x 2n boxes of height 1/(2n): hexahedra everywhere except
/// the layer touching z = 1, where each box becomes five pyramids and two
/// tetrahedra around its centre.
Mesh generate_grid_mesh(int nsd, MeshFamily family, int n,
                        const BoundaryRule& rule = all_dirichlet);

/// Same as generate_grid_mesh with n = divisions_for_level(nsd, level).
Mesh generate_structured_mesh(int nsd, MeshFamily family, int level,
                              const BoundaryRule& rule = all_dirichlet);

}  // namespace fcfv
