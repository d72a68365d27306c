#pragma once

#include <vector>

#include "fcfv/basis.hpp"

namespace fcfv {

/// Global numbering of the hybrid unknowns: one per non-Dirichlet face.
struct TraceNumbering {
  /// Dof of each mesh face, -1 for Dirichlet faces.
  std::vector<Index> dof_of_face;
  Index count = 0;
};

TraceNumbering number_traces(const Mesh& mesh);

struct LocalFace {
  Index face = -1;
  /// Trace dof, -1 on Dirichlet faces.
  Index dof = -1;
  BoundaryTag tag = BoundaryTag::Interior;
  double area = 0.0;
  Point normal = Point::Zero();
  Point centroid = Point::Zero();
  double tau = 0.0;
  BasisVector r;
  BasisVector p;

  bool dirichlet() const noexcept { return tag == BoundaryTag::Dirichlet; }
  bool neumann() const noexcept { return tag == BoundaryTag::Neumann; }
};

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

/// Cell data shared by the scalar and vector problems: face integrals and
/// m = sum_j tau_j r_j p_j^T with its inverse.
struct CellOperator {
  Index cell = -1;
  int nsd = 2;
  CellType type = CellType::Tri;
  double volume = 0.0;
  Point centroid = Point::Zero();
  std::vector<LocalFace> faces;
  BasisMatrix m;
  BasisMatrix m_inv;
};

/// Throws DegenerateCellError when cond(m) > 1e12.
CellOperator build_cell_operator(const Mesh& mesh, const MeshGeometry& geo, Index e, double tau,
                                 const TraceNumbering& numbering);

/// Face-by-face trace coupling for all local faces:
/// |G_i| (tau_i tau_j p_i . m^-1 r_j - nu |G_j| n_i . n_j / |cell| - tau_i delta_ij).
LocalMatrix trace_coupling(const CellOperator& op, double nu);

/// Default stabilisation: 1e4 in 2D, 1e2 in 3D.
inline double default_tau(int nsd) { return nsd == 2 ? 1e4 : 1e2; }

}  // namespace fcfv
