#pragma once

#include <vector>

#include "fcfv/linear_system.hpp"
#include "fcfv/local_operator.hpp"

namespace fcfv {

/// Row-major nsd x nsd tensor stored in a fixed 3x3 (unused entries zero).
using Tensor = Eigen::Matrix3d;

/// -nu laplace(u) + grad(p) = s, div(u) = 0, with u = u_D on Dirichlet faces
/// and n . (nu grad(u) - p I) = t on Neumann faces.
struct StokesProblem {
  double nu = 1.0;
  VectorField source;
  VectorField dirichlet;
  VectorFluxField neumann;
  double tau = 1e4;
  int source_degree = 2;
};

struct StokesLocalOperators {
  CellOperator op;
  /// One column per velocity component: f + sum over Dirichlet faces of tau u_D r.
  BasisMoments b;
  /// Sum over Dirichlet faces of |G| n (x) u_D, (n (x) u)_ab = n_a u_b.
  Tensor z = Tensor::Zero();
  /// Per local face: u_D on Dirichlet faces, t on Neumann faces, 0 otherwise.
  std::vector<Eigen::Vector3d> face_data;
  /// Source value at the cell centroid.
  Eigen::Vector3d source_centroid = Eigen::Vector3d::Zero();
};

StokesLocalOperators assemble_local_stokes(const Mesh& mesh, const MeshGeometry& geo, Index e,
                                           const StokesProblem& problem,
                                           const TraceNumbering& numbering);

struct StokesLocalSolution {
  /// Component-major velocity coefficients (nsd M).
  Eigen::VectorXd c;
  double p = 0.0;
  /// L = -sqrt(nu) grad(u) with (grad u)_ab = d u_b / d x_a.
  Tensor L = Tensor::Zero();
};

/// `trace` holds nsd values per trace dof, ordered dof-major.
StokesLocalSolution solve_local_stokes(const StokesLocalOperators& ops, double nu,
                                       const Eigen::VectorXd& trace, double rho);

/// Componentwise constant first-order recovery.
Eigen::Vector3d recover_first_order(const StokesLocalOperators& ops, const Eigen::VectorXd& trace);

struct StokesSystem {
  TraceNumbering numbering;
  /// [[K_uu, K_urho], [K_urho^T, 0]] plus a bordered mean-pressure row when
  /// the boundary is fully Dirichlet.
  SparseMatrix A;
  Eigen::VectorXd f;
  Index n_velocity = 0;
  Index n_pressure = 0;
  bool mean_pressure_constraint = false;
  std::vector<StokesLocalOperators> locals;
};

StokesSystem assemble_global_stokes(const Mesh& mesh, const MeshGeometry& geo,
                                    const StokesProblem& problem);

struct StokesSolution {
  TraceNumbering numbering;
  Eigen::VectorXd trace;
  std::vector<double> rho;
  std::vector<Eigen::VectorXd> c;
  std::vector<double> p;
  std::vector<Tensor> L;
  std::vector<Eigen::Vector3d> u_star;
  bool mean_pressure_constraint = false;
  double residual = 0.0;
  /// Symmetry defect of the velocity block.
  double symmetry_defect = 0.0;
  /// Largest per-cell |sum_j |G_j| u_j . n_j| over the cell's faces.
  double incompressibility_residual = 0.0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  /// CG iterations of the Schur complement solver (0 for direct solvers).
  int solver_iterations = 0;
};

StokesSolution solve_stokes(const Mesh& mesh, const MeshGeometry& geo, const StokesProblem& problem,
                            SolverKind solver = SolverKind::SchurCG);
StokesSolution solve_stokes(const Mesh& mesh, const StokesProblem& problem,
                            SolverKind solver = SolverKind::SchurCG);

/// Per-cell net outflow of the trace velocity (Dirichlet data on Dirichlet faces).
std::vector<double> incompressibility_residuals(const Mesh& mesh, const StokesSystem& sys,
                                                const Eigen::VectorXd& trace);

}  // namespace fcfv
