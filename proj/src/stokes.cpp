#include "fcfv/stokes.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::Vector3d trace_value(const StokesLocalOperators& ops, std::size_t j,
                            const Eigen::VectorXd& trace) {
  const LocalFace& f = ops.op.faces[j];
  if (f.dirichlet()) return ops.face_data[j];
  const int nsd = ops.op.nsd;
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  for (int a = 0; a < nsd; ++a) u[a] = trace[nsd * f.dof + a];
  return u;
}

// Pressure Schur complement S = -B^T K^-1 B solved by CG preconditioned with
// the cell volumes. K = K_s (x) I, so one LDLT of K_s serves every component.
SolveResult solve_schur(const StokesSystem& sys, int nsd, const std::vector<double>& volumes,
                        double tolerance, int& iterations) {
  const Index nv = sys.n_velocity;
  const Index np = sys.n_pressure;
  const Index nt = nv / nsd;
  std::vector<Triplet> kt, bt;
  for (Index c = 0; c < sys.A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(sys.A, c); it; ++it) {
      const Index r = it.row();
      if (r >= nv) continue;
      if (c < nv) {
        if (r % nsd == 0 && c % nsd == 0) kt.emplace_back(r / nsd, c / nsd, it.value());
      } else if (c < nv + np) {
        bt.emplace_back(r, c - nv, it.value());
      }
    }
  }
  SparseMatrix ks = compress(nt, kt);
  SparseMatrix b(nv, np);
  b.setFromTriplets(bt.begin(), bt.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(ks);
  if (ldlt.info() != Eigen::Success) throw SolverError("LDLT of the velocity block failed");

  auto k_inv = [&](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd x =
        ldlt.solve(Eigen::Map<const Eigen::MatrixXd>(v.data(), nsd, nt).transpose());
    Eigen::VectorXd out(nv);
    Eigen::Map<Eigen::MatrixXd>(out.data(), nsd, nt) = x.transpose();
    return out;
  };
  auto schur = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return -(b.transpose() * k_inv(b * p));
  };

  const Eigen::VectorXd fu = sys.f.head(nv);
  const Eigen::VectorXd kf = k_inv(fu);
  Eigen::VectorXd g = sys.f.segment(nv, np) - b.transpose() * kf;
  const Eigen::Map<const Eigen::VectorXd> w(volumes.data(), np);
  double mu = 0.0;
  if (sys.mean_pressure_constraint) {
    mu = g.sum() / w.sum();
    g -= mu * w;
  }

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd r = g;
  Eigen::VectorXd z = r.cwiseQuotient(w);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  const double gnorm = g.norm();
  iterations = 0;
  const int max_iter = static_cast<int>(std::min<Index>(np, 5000)) + 10;
  while (gnorm > 0.0 && r.norm() > 1e-14 * gnorm && iterations < max_iter) {
    const Eigen::VectorXd sd = schur(d);
    const double alpha = rz / d.dot(sd);
    rho += alpha * d;
    r -= alpha * sd;
    z = r.cwiseQuotient(w);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
    ++iterations;
  }
  if (sys.mean_pressure_constraint) rho.array() -= rho.dot(w) / w.sum();

  SolveResult out;
  out.x.resize(sys.A.rows());
  out.x.head(nv) = k_inv(fu - b * rho);
  out.x.segment(nv, np) = rho;
  if (sys.mean_pressure_constraint) out.x[nv + np] = mu;
  out.residual = relative_residual(sys.A, out.x, sys.f);
  if (!std::isfinite(out.residual) || out.residual > tolerance) {
    throw SolverError("Schur complement solve residual " + std::to_string(out.residual) +
                          " above tolerance after " + std::to_string(iterations) + " iterations",
                      out.residual);
  }
  return out;
}

}  // namespace

StokesLocalOperators assemble_local_stokes(const Mesh& mesh, const MeshGeometry& geo, Index e,
                                           const StokesProblem& problem,
                                           const TraceNumbering& numbering) {
  if (!(problem.nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  StokesLocalOperators ops;
  ops.op = build_cell_operator(mesh, geo, e, problem.tau, numbering);
  const CellOperator& op = ops.op;
  ops.b = cell_integrals(op.nsd, op.type, mesh.cell_points(e), geo.cell(e), problem.source,
                         problem.source_degree)
              .source;
  ops.source_centroid = problem.source(op.centroid);
  ops.face_data.assign(op.faces.size(), Eigen::Vector3d::Zero());
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    if (f.dirichlet()) {
      Eigen::Vector3d ud = problem.dirichlet(f.centroid);
      if (op.nsd == 2) ud[2] = 0.0;
      ops.face_data[j] = ud;
      for (int a = 0; a < op.nsd; ++a) ops.b.col(a) += f.tau * ud[a] * f.r;
      ops.z += f.area * f.normal * ud.transpose();
    } else if (f.neumann()) {
      if (!problem.neumann) throw std::invalid_argument("Neumann faces present but no Neumann datum");
      Eigen::Vector3d t = problem.neumann(f.centroid, f.normal);
      if (op.nsd == 2) t[2] = 0.0;
      ops.face_data[j] = t;
    }
  }
  return ops;
}

StokesLocalSolution solve_local_stokes(const StokesLocalOperators& ops, double nu,
                                       const Eigen::VectorXd& trace, double rho) {
  const CellOperator& op = ops.op;
  const int nsd = op.nsd;
  const int m = basis_size(nsd);
  Tensor flux = ops.z;
  BasisMoments rhs = ops.b;
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    if (f.dirichlet()) continue;
    const Eigen::Vector3d u = trace_value(ops, j, trace);
    flux += f.area * f.normal * u.transpose();
    for (int a = 0; a < nsd; ++a) rhs.col(a) += f.tau * u[a] * f.r;
  }
  StokesLocalSolution out;
  out.L = -std::sqrt(nu) / op.volume * flux;
  out.c.resize(nsd * m);
  // Block-diagonal local matrix: one solve with m^-1 per component.
  for (int a = 0; a < nsd; ++a) out.c.segment(a * m, m) = op.m_inv * rhs.col(a);
  out.p = rho;
  return out;
}

Eigen::Vector3d recover_first_order(const StokesLocalOperators& ops, const Eigen::VectorXd& trace) {
  const CellOperator& op = ops.op;
  double alpha = 0.0;
  Eigen::Vector3d beta = op.volume * ops.source_centroid;
  if (op.nsd == 2) beta[2] = 0.0;
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    alpha += f.area * f.tau;
    beta += f.area * f.tau * trace_value(ops, j, trace);
  }
  return beta / alpha;
}

StokesSystem assemble_global_stokes(const Mesh& mesh, const MeshGeometry& geo,
                                    const StokesProblem& problem) {
  StokesSystem sys;
  const int nsd = mesh.nsd();
  sys.numbering = number_traces(mesh);
  sys.n_velocity = nsd * sys.numbering.count;
  sys.n_pressure = mesh.num_cells();
  sys.mean_pressure_constraint = true;
  for (const Face& f : mesh.faces()) {
    if (f.tag == BoundaryTag::Neumann) sys.mean_pressure_constraint = false;
  }
  const Index n = sys.n_velocity + sys.n_pressure + (sys.mean_pressure_constraint ? 1 : 0);
  sys.f = Eigen::VectorXd::Zero(n);
  sys.locals.reserve(static_cast<std::size_t>(mesh.num_cells()));

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * 6 * 6 * nsd + 12 * nsd);
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    sys.locals.push_back(assemble_local_stokes(mesh, geo, e, problem, sys.numbering));
    const StokesLocalOperators& ops = sys.locals.back();
    const CellOperator& op = ops.op;
    const LocalMatrix k = trace_coupling(op, problem.nu);
    const BasisMoments mb = op.m_inv * ops.b;
    const Index prow = sys.n_velocity + e;
    for (std::size_t i = 0; i < op.faces.size(); ++i) {
      const LocalFace& fi = op.faces[i];
      if (fi.dirichlet()) {
        sys.f[prow] -= fi.area * ops.face_data[i].dot(fi.normal);
        continue;
      }
      const Eigen::Vector3d nz = ops.z.transpose() * fi.normal;
      for (int a = 0; a < nsd; ++a) {
        const Index row = nsd * fi.dof + a;
        double fv = problem.nu * nz[a] / op.volume - fi.tau * fi.p.dot(mb.col(a));
        if (fi.neumann()) fv -= ops.face_data[i][a];
        sys.f[row] += fi.area * fv;
        triplets.emplace_back(row, prow, fi.area * fi.normal[a]);
        triplets.emplace_back(prow, row, fi.area * fi.normal[a]);
        for (std::size_t j = 0; j < op.faces.size(); ++j) {
          const LocalFace& fj = op.faces[j];
          if (fj.dirichlet()) continue;
          triplets.emplace_back(row, nsd * fj.dof + a,
                                k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
      }
    }
    if (sys.mean_pressure_constraint) {
      triplets.emplace_back(n - 1, prow, op.volume);
      triplets.emplace_back(prow, n - 1, op.volume);
    }
  }
  sys.A = compress(n, triplets);
  return sys;
}

std::vector<double> incompressibility_residuals(const Mesh& mesh, const StokesSystem& sys,
                                                const Eigen::VectorXd& trace) {
  std::vector<double> out(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  for (std::size_t e = 0; e < out.size(); ++e) {
    const StokesLocalOperators& ops = sys.locals[e];
    for (std::size_t j = 0; j < ops.op.faces.size(); ++j) {
      const LocalFace& f = ops.op.faces[j];
      out[e] += f.area * trace_value(ops, j, trace).dot(f.normal);
    }
  }
  return out;
}

StokesSolution solve_stokes(const Mesh& mesh, const MeshGeometry& geo, const StokesProblem& problem,
                            SolverKind solver) {
  StokesSolution sol;
  auto t0 = std::chrono::steady_clock::now();
  StokesSystem sys = assemble_global_stokes(mesh, geo, problem);
  sol.t_assemble = seconds_since(t0);
  sol.symmetry_defect = symmetry_defect(sys.A.topLeftCorner(sys.n_velocity, sys.n_velocity));
  sol.mean_pressure_constraint = sys.mean_pressure_constraint;

  t0 = std::chrono::steady_clock::now();
  SolveResult res;
  if (solver == SolverKind::SchurCG) {
    std::vector<double> volumes(static_cast<std::size_t>(mesh.num_cells()));
    for (Index e = 0; e < mesh.num_cells(); ++e) volumes[static_cast<std::size_t>(e)] = geo.cell(e).volume;
    res = solve_schur(sys, mesh.nsd(), volumes, 1e-10, sol.solver_iterations);
  } else {
    res = solve_direct(sys.A, sys.f, solver);
  }
  sol.t_solve = seconds_since(t0);
  sol.residual = res.residual;
  sol.trace = res.x.head(sys.n_velocity);

  const auto n = static_cast<std::size_t>(mesh.num_cells());
  sol.rho.resize(n);
  sol.c.resize(n);
  sol.p.resize(n);
  sol.L.resize(n);
  sol.u_star.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    sol.rho[e] = res.x[sys.n_velocity + static_cast<Index>(e)];
    const StokesLocalSolution local =
        solve_local_stokes(sys.locals[e], problem.nu, sol.trace, sol.rho[e]);
    sol.c[e] = local.c;
    sol.p[e] = local.p;
    sol.L[e] = local.L;
    sol.u_star[e] = recover_first_order(sys.locals[e], sol.trace);
  }
  for (double r : incompressibility_residuals(mesh, sys, sol.trace)) {
    sol.incompressibility_residual = std::max(sol.incompressibility_residual, std::abs(r));
  }
  sol.numbering = std::move(sys.numbering);
  return sol;
}

StokesSolution solve_stokes(const Mesh& mesh, const StokesProblem& problem, SolverKind solver) {
  return solve_stokes(mesh, compute_geometry(mesh), problem, solver);
}

}  // namespace fcfv
