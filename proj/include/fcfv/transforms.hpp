#pragma once

#include <cstdint>

#include "fcfv/mesh.hpp"

namespace fcfv {

struct DistortStats {
  Index moved = 0;
  /// Vertices left in place because every trial position inverted a cell.
  Index unmoved = 0;
  double max_displacement = 0.0;
  /// Bound on the displacement: a quarter of the input's shortest edge.
  double bound = 0.0;
  /// True when boundary vertices slid along their boundary planes (3D meshes
  /// with quadrilateral faces).
  bool boundary_sliding = false;
};

/// Random vertex perturbation of magnitude at most h_min/4.
///
/// Triangle, quadrilateral and tetrahedral meshes move interior vertices only,
/// each in a random direction; a move that inverts an incident cell is halved
/// up to four times and then dropped. 3D meshes with quadrilateral faces
/// perturb whole grid planes instead (x- and y-planes stay vertical, z-planes
/// tilt freely) and place each vertex at the intersection of its three planes,
/// so every face stays planar. Boundary planes are fixed, so boundary
/// vertices only slide within them.
Mesh distort_mesh(const Mesh& mesh, std::uint64_t seed, DistortStats* stats = nullptr);

/// Exponential (geometric) grading of the last coordinate toward its lower
/// end, calibrated so that the largest cell edge ratio equals `s` (within
/// 1%). Horizontal and vertical faces stay planar. s = 1 returns the mesh
/// unchanged.
Mesh stretch_mesh(const Mesh& mesh, double s);

/// Largest ratio of longest to shortest edge over all cells.
double stretching_factor(const Mesh& mesh);

}  // namespace fcfv
