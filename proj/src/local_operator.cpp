#include "fcfv/local_operator.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fcfv/errors.hpp"

namespace fcfv {

TraceNumbering number_traces(const Mesh& mesh) {
  TraceNumbering n;
  n.dof_of_face.assign(static_cast<std::size_t>(mesh.num_faces()), -1);
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face(f).tag != BoundaryTag::Dirichlet) n.dof_of_face[static_cast<std::size_t>(f)] = n.count++;
  }
  return n;
}

CellOperator build_cell_operator(const Mesh& mesh, const MeshGeometry& geo, Index e, double tau,
                                 const TraceNumbering& numbering) {
  if (!(tau > 0.0)) throw std::invalid_argument("stabilisation parameter must be positive");
  const CellGeometry& g = geo.cell(e);
  CellOperator op;
  op.cell = e;
  op.nsd = mesh.nsd();
  op.type = mesh.cell(e).type;
  op.volume = g.volume;
  op.centroid = g.centroid;
  const int m = basis_size(op.nsd);
  op.m = BasisMatrix::Zero(m, m);
  const auto face_ids = mesh.cell_faces(e);
  op.faces.resize(face_ids.size());
  for (std::size_t j = 0; j < face_ids.size(); ++j) {
    LocalFace& lf = op.faces[j];
    const FaceGeometry& fg = g.faces[j];
    lf.face = face_ids[j];
    lf.dof = numbering.dof_of_face[static_cast<std::size_t>(lf.face)];
    lf.tag = mesh.face(lf.face).tag;
    lf.area = fg.area;
    lf.normal = fg.normal;
    lf.centroid = fg.centroid;
    lf.tau = tau;
    const FaceBasisIntegrals fi =
        face_integrals(op.nsd, g.centroid, fg, mesh.local_face_points(e, static_cast<int>(j)));
    lf.r = fi.r;
    lf.p = fi.p;
    op.m += lf.tau * lf.r * lf.p.transpose();
  }
  Eigen::SelfAdjointEigenSolver<BasisMatrix> eig(0.5 * (op.m + op.m.transpose()),
                                                 Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw DegenerateCellError(e, "local matrix is singular or ill-conditioned");
  }
  op.m_inv = op.m.partialPivLu().inverse();
  return op;
}

LocalMatrix trace_coupling(const CellOperator& op, double nu) {
  const auto nf = static_cast<Eigen::Index>(op.faces.size());
  LocalMatrix k(nf, nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const LocalFace& fi = op.faces[static_cast<std::size_t>(i)];
    const BasisVector pm = op.m_inv.transpose() * fi.p;
    for (Eigen::Index j = 0; j < nf; ++j) {
      const LocalFace& fj = op.faces[static_cast<std::size_t>(j)];
      double v = fi.tau * fj.tau * pm.dot(fj.r) -
                 nu * fj.area * fi.normal.dot(fj.normal) / op.volume;
      if (i == j) v -= fi.tau;
      k(i, j) = fi.area * v;
    }
  }
  return k;
}

}  // namespace fcfv
