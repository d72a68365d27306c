#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "fcfv/types.hpp"

namespace fcfv {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Square n x n matrix from triplets; duplicates are summed. Throws
/// std::out_of_range on an index outside [0, n).
SparseMatrix compress(Index n, const std::vector<Triplet>& triplets);

enum class SolverKind : std::uint8_t {
  /// Supernodal LU with partial pivoting; handles indefinite saddle systems.
  SparseLU,
  /// Simplicial LDL^T without pivoting; for definite (either sign) systems.
  LDLT,
  /// Conjugate gradients on -A for negative definite A, A for positive definite.
  CG,
  /// Stokes only: CG on the pressure Schur complement, with the velocity
  /// block factored once by LDLT (it is the scalar trace matrix per component).
  SchurCG,
};

std::string_view to_string(SolverKind kind);
SolverKind solver_kind_from_string(std::string_view name);

struct SolveResult {
  Eigen::VectorXd x;
  /// ||Ax - b|| / ||b|| (absolute when b = 0).
  double residual = 0.0;
};

/// Throws SolverError when the factorization fails or the relative residual
/// exceeds `tolerance`.
SolveResult solve_direct(const SparseMatrix& a, const Eigen::VectorXd& b,
                         SolverKind kind = SolverKind::SparseLU, double tolerance = 1e-10);

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// max |A - A^T| / max |A| (0 for an empty matrix).
double symmetry_defect(const SparseMatrix& a);

/// Matrix Market coordinate format, general real.
void write_matrix_market(const SparseMatrix& a, const std::string& path);

}  // namespace fcfv
