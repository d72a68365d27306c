#pragma once

#include <vector>

#include "fcfv/geometry.hpp"

namespace fcfv {

/// Small vectors and matrices sized by the number of basis functions
/// M = nsd + 1 (at most 4); no heap allocation.
using BasisVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using BasisMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
/// One column of basis moments per velocity component.
using BasisMoments = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3>;

inline int basis_size(int nsd) { return nsd + 1; }

/// Values of N_1 = 1, N_k = x_{k-1} - xbar_{k-1} at x.
BasisVector basis_values(int nsd, const Point& centroid, const Point& x);

/// Value at x of the linear field with coefficients c.
inline double evaluate_linear(const BasisVector& c, int nsd, const Point& centroid, const Point& x) {
  return c.dot(basis_values(nsd, centroid, x));
}

struct FaceBasisIntegrals {
  /// r_I = integral of N_I over the face.
  BasisVector r;
  /// Projection vector: basis values at the face centroid.
  BasisVector p;
};

/// Edges and triangles use r = |face| p. Quadrilateral faces in 3D integrate
/// N_k with a 2x2 Gauss rule on the bilinear map.
FaceBasisIntegrals face_integrals(int nsd, const Point& cell_centroid, const FaceGeometry& face,
                                  const std::vector<Point>& face_pts);

struct CellBasisIntegrals {
  /// Integrals of N_I over the cell.
  BasisVector moments;
  /// Source moments, one column per source component.
  BasisMoments source;
};

/// Basis moments (exact) and source moments by sub-simplex quadrature of the
/// given degree (2 by default, up to 6).
CellBasisIntegrals cell_integrals(int nsd, CellType type, const std::vector<Point>& pts,
                                  const CellGeometry& geom, const ScalarField& source,
                                  int degree = 2);
CellBasisIntegrals cell_integrals(int nsd, CellType type, const std::vector<Point>& pts,
                                  const CellGeometry& geom, const VectorField& source,
                                  int degree = 2);

/// Second moments G_IJ = integral of N_I N_J over the cell.
BasisMatrix gram_matrix(int nsd, CellType type, const std::vector<Point>& pts,
                        const Point& centroid);

/// nsd x (nsd M) block arrangement of p^T acting on component-major
/// coefficients (all M coefficients of component 1, then component 2, ...).
Eigen::MatrixXd projection_matrix(const BasisVector& p, int nsd);

}  // namespace fcfv
