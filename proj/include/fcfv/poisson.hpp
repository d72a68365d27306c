#pragma once

#include <vector>

#include "fcfv/linear_system.hpp"
#include "fcfv/local_operator.hpp"

namespace fcfv {

/// -laplace(u) = s with u = u_D on Dirichlet faces and n . grad(u) = t on
/// Neumann faces. Face data are evaluated at face centroids.
struct PoissonProblem {
  ScalarField source;
  ScalarField dirichlet;
  /// t(x, n); may be empty when the mesh has no Neumann faces.
  ScalarFluxField neumann;
  double tau = 1e4;
  int source_degree = 2;
};

struct PoissonLocalOperators {
  CellOperator op;
  /// f + sum over Dirichlet faces of tau u_D r.
  BasisVector b;
  /// Sum over Dirichlet faces of |G| n u_D.
  Point z = Point::Zero();
  /// Per local face: u_D on Dirichlet faces, t on Neumann faces, 0 otherwise.
  std::vector<double> face_data;
  /// Source value at the cell centroid.
  double source_centroid = 0.0;
};

PoissonLocalOperators assemble_local_poisson(const Mesh& mesh, const MeshGeometry& geo, Index e,
                                             const PoissonProblem& problem,
                                             const TraceNumbering& numbering);

struct PoissonLocalSolution {
  /// Coefficients of u in the cell basis.
  BasisVector c;
  /// Constant flux q = -grad(u).
  Point q = Point::Zero();
};

/// `trace` holds the global hybrid unknowns.
PoissonLocalSolution solve_local_poisson(const PoissonLocalOperators& ops,
                                         const Eigen::VectorXd& trace);

/// Constant first-order recovery from the same trace.
double recover_first_order(const PoissonLocalOperators& ops, const Eigen::VectorXd& trace);

struct PoissonSystem {
  TraceNumbering numbering;
  SparseMatrix K;
  Eigen::VectorXd f;
  std::vector<PoissonLocalOperators> locals;
};

PoissonSystem assemble_global_poisson(const Mesh& mesh, const MeshGeometry& geo,
                                      const PoissonProblem& problem);

struct PoissonSolution {
  TraceNumbering numbering;
  Eigen::VectorXd trace;
  std::vector<BasisVector> c;
  std::vector<Point> q;
  std::vector<double> u_star;
  double residual = 0.0;
  double symmetry_defect = 0.0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

PoissonSolution solve_poisson(const Mesh& mesh, const MeshGeometry& geo,
                              const PoissonProblem& problem,
                              SolverKind solver = SolverKind::LDLT);
PoissonSolution solve_poisson(const Mesh& mesh, const PoissonProblem& problem,
                              SolverKind solver = SolverKind::LDLT);

}  // namespace fcfv
