#include "fcfv/linear_system.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "fcfv/errors.hpp"

namespace fcfv {

SparseMatrix compress(Index n, const std::vector<Triplet>& triplets) {
  for (const Triplet& t : triplets) {
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n) {
      throw std::out_of_range("triplet (" + std::to_string(t.row()) + ", " +
                              std::to_string(t.col()) + ") outside a " + std::to_string(n) +
                              " x " + std::to_string(n) + " matrix");
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::SparseLU: return "sparse-lu";
    case SolverKind::LDLT: return "ldlt";
    case SolverKind::CG: return "cg";
    case SolverKind::SchurCG: return "schur-cg";
  }
  return "?";
}

SolverKind solver_kind_from_string(std::string_view name) {
  for (SolverKind k : {SolverKind::SparseLU, SolverKind::LDLT, SolverKind::CG, SolverKind::SchurCG}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (a * x - b).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

SolveResult solve_direct(const SparseMatrix& a, const Eigen::VectorXd& b, SolverKind kind,
                         double tolerance) {
  SolveResult out;
  if (a.rows() == 0) {
    out.x = Eigen::VectorXd();
    return out;
  }
  switch (kind) {
    case SolverKind::SparseLU: {
      Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
      lu.compute(a);
      if (lu.info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed (singular matrix?): " + lu.lastErrorMessage());
      }
      out.x = lu.solve(b);
      break;
    }
    case SolverKind::LDLT: {
      Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
      if (ldlt.info() != Eigen::Success) throw SolverError("LDLT factorization failed");
      out.x = ldlt.solve(b);
      break;
    }
    case SolverKind::CG: {
      // Definiteness sign from the diagonal; CG needs a positive definite operator.
      const double sign = a.diagonal().sum() < 0 ? -1.0 : 1.0;
      const SparseMatrix pos = sign * a;
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(tolerance * 1e-2);
      cg.setMaxIterations(static_cast<Eigen::Index>(10 * a.rows() + 100));
      cg.compute(pos);
      out.x = cg.solve(sign * b);
      break;
    }
    case SolverKind::SchurCG:
      throw ConfigError("schur-cg applies to Stokes saddle-point systems only");
  }
  out.residual = relative_residual(a, out.x, b);
  if (!std::isfinite(out.residual) || out.residual > tolerance) {
    throw SolverError("linear solve residual " + std::to_string(out.residual) +
                          " above tolerance (" + std::string(to_string(kind)) + ")",
                      out.residual);
  }
  return out;
}

double symmetry_defect(const SparseMatrix& a) {
  if (a.nonZeros() == 0) return 0.0;
  const SparseMatrix at = a.transpose();
  const SparseMatrix diff = a - at;
  double dmax = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  }
  double amax = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  }
  return amax > 0.0 ? dmax / amax : 0.0;
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace fcfv
