#include "fcfv/basis.hpp"

#include <stdexcept>

#include "fcfv/quadrature.hpp"

namespace fcfv {

BasisVector basis_values(int nsd, const Point& centroid, const Point& x) {
  BasisVector v(basis_size(nsd));
  v[0] = 1.0;
  for (int k = 0; k < nsd; ++k) v[k + 1] = x[k] - centroid[k];
  return v;
}

FaceBasisIntegrals face_integrals(int nsd, const Point& cell_centroid, const FaceGeometry& face,
                                  const std::vector<Point>& face_pts) {
  FaceBasisIntegrals out;
  out.p = basis_values(nsd, cell_centroid, face.centroid);
  if (nsd == 3 && face_pts.size() == 4) {
    out.r = BasisVector::Zero(basis_size(nsd));
    for (const QuadraturePoint& q : quad_face_gauss(face_pts)) {
      out.r += q.weight * basis_values(nsd, cell_centroid, q.x);
    }
    out.r[0] = face.area;
  } else {
    out.r = face.area * out.p;
  }
  return out;
}

namespace {

template <typename Field>
CellBasisIntegrals integrate_cell(int nsd, CellType type, const std::vector<Point>& pts,
                                  const CellGeometry& geom, const Field& source, int ncomp,
                                  int degree) {
  if (degree < 0 || degree > 6) throw std::invalid_argument("source quadrature degree must be 0..6");
  const int m = basis_size(nsd);
  CellBasisIntegrals out;
  out.moments = BasisVector::Zero(m);
  out.source = BasisMoments::Zero(m, ncomp);
  // Moments of a linear basis only need the sub-simplex centroids.
  for (const Simplex& s : sub_simplices(type, pts)) {
    out.moments += s.signed_measure() * basis_values(nsd, geom.centroid, s.centroid());
  }
  for (const QuadraturePoint& q : cell_quadrature(type, pts, degree)) {
    const BasisVector n = basis_values(nsd, geom.centroid, q.x);
    if constexpr (std::is_same_v<Field, ScalarField>) {
      out.source.col(0) += (q.weight * source(q.x)) * n;
    } else {
      const Eigen::Vector3d s = source(q.x);
      for (int a = 0; a < ncomp; ++a) out.source.col(a) += (q.weight * s[a]) * n;
    }
  }
  return out;
}

}  // namespace

CellBasisIntegrals cell_integrals(int nsd, CellType type, const std::vector<Point>& pts,
                                  const CellGeometry& geom, const ScalarField& source,
                                  int degree) {
  return integrate_cell(nsd, type, pts, geom, source, 1, degree);
}

CellBasisIntegrals cell_integrals(int nsd, CellType type, const std::vector<Point>& pts,
                                  const CellGeometry& geom, const VectorField& source,
                                  int degree) {
  return integrate_cell(nsd, type, pts, geom, source, nsd, degree);
}

BasisMatrix gram_matrix(int nsd, CellType type, const std::vector<Point>& pts,
                        const Point& centroid) {
  const int m = basis_size(nsd);
  BasisMatrix g = BasisMatrix::Zero(m, m);
  for (const QuadraturePoint& q : cell_quadrature(type, pts, 2)) {
    const BasisVector n = basis_values(nsd, centroid, q.x);
    g += q.weight * n * n.transpose();
  }
  return g;
}

Eigen::MatrixXd projection_matrix(const BasisVector& p, int nsd) {
  const auto m = p.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nsd, nsd * m);
  for (int a = 0; a < nsd; ++a) out.block(a, a * m, 1, m) = p.transpose();
  return out;
}

}  // namespace fcfv
