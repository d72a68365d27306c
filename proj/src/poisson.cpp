#include "fcfv/poisson.hpp"

#include <chrono>

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double face_value(const PoissonLocalOperators& ops, std::size_t j, const Eigen::VectorXd& trace) {
  const LocalFace& f = ops.op.faces[j];
  return f.dirichlet() ? ops.face_data[j] : trace[f.dof];
}

}  // namespace

PoissonLocalOperators assemble_local_poisson(const Mesh& mesh, const MeshGeometry& geo, Index e,
                                             const PoissonProblem& problem,
                                             const TraceNumbering& numbering) {
  PoissonLocalOperators ops;
  ops.op = build_cell_operator(mesh, geo, e, problem.tau, numbering);
  const CellOperator& op = ops.op;
  ops.b = cell_integrals(op.nsd, op.type, mesh.cell_points(e), geo.cell(e), problem.source,
                         problem.source_degree)
              .source.col(0);
  ops.source_centroid = problem.source(op.centroid);
  ops.face_data.assign(op.faces.size(), 0.0);
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    if (f.dirichlet()) {
      const double ud = problem.dirichlet(f.centroid);
      ops.face_data[j] = ud;
      ops.b += f.tau * ud * f.r;
      ops.z += f.area * ud * f.normal;
    } else if (f.neumann()) {
      if (!problem.neumann) throw std::invalid_argument("Neumann faces present but no Neumann datum");
      ops.face_data[j] = problem.neumann(f.centroid, f.normal);
    }
  }
  return ops;
}

PoissonLocalSolution solve_local_poisson(const PoissonLocalOperators& ops,
                                         const Eigen::VectorXd& trace) {
  const CellOperator& op = ops.op;
  PoissonLocalSolution out;
  Point flux = ops.z;
  BasisVector rhs = ops.b;
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    if (f.dirichlet()) continue;
    const double u = trace[f.dof];
    flux += f.area * u * f.normal;
    rhs += f.tau * u * f.r;
  }
  out.q = -flux / op.volume;
  out.c = op.m_inv * rhs;
  return out;
}

double recover_first_order(const PoissonLocalOperators& ops, const Eigen::VectorXd& trace) {
  const CellOperator& op = ops.op;
  double alpha = 0.0;
  double beta = op.volume * ops.source_centroid;
  for (std::size_t j = 0; j < op.faces.size(); ++j) {
    const LocalFace& f = op.faces[j];
    alpha += f.area * f.tau;
    beta += f.area * f.tau * face_value(ops, j, trace);
  }
  return beta / alpha;
}

PoissonSystem assemble_global_poisson(const Mesh& mesh, const MeshGeometry& geo,
                                      const PoissonProblem& problem) {
  PoissonSystem sys;
  sys.numbering = number_traces(mesh);
  sys.f = Eigen::VectorXd::Zero(sys.numbering.count);
  sys.locals.reserve(static_cast<std::size_t>(mesh.num_cells()));
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * 36);
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    sys.locals.push_back(assemble_local_poisson(mesh, geo, e, problem, sys.numbering));
    const PoissonLocalOperators& ops = sys.locals.back();
    const CellOperator& op = ops.op;
    const LocalMatrix k = trace_coupling(op, 1.0);
    const BasisVector mb = op.m_inv * ops.b;
    for (std::size_t i = 0; i < op.faces.size(); ++i) {
      const LocalFace& fi = op.faces[i];
      if (fi.dirichlet()) continue;
      double fv = fi.normal.dot(ops.z) / op.volume - fi.tau * fi.p.dot(mb);
      if (fi.neumann()) fv -= ops.face_data[i];
      sys.f[fi.dof] += fi.area * fv;
      for (std::size_t j = 0; j < op.faces.size(); ++j) {
        const LocalFace& fj = op.faces[j];
        if (fj.dirichlet()) continue;
        triplets.emplace_back(fi.dof, fj.dof,
                              k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
  }
  sys.K = compress(sys.numbering.count, triplets);
  return sys;
}

PoissonSolution solve_poisson(const Mesh& mesh, const MeshGeometry& geo,
                              const PoissonProblem& problem, SolverKind solver) {
  PoissonSolution sol;
  auto t0 = std::chrono::steady_clock::now();
  PoissonSystem sys = assemble_global_poisson(mesh, geo, problem);
  sol.t_assemble = seconds_since(t0);
  sol.symmetry_defect = symmetry_defect(sys.K);

  t0 = std::chrono::steady_clock::now();
  SolveResult res = solve_direct(sys.K, sys.f, solver);
  sol.t_solve = seconds_since(t0);
  sol.residual = res.residual;
  sol.trace = std::move(res.x);
  sol.numbering = std::move(sys.numbering);

  const auto n = static_cast<std::size_t>(mesh.num_cells());
  sol.c.resize(n);
  sol.q.resize(n);
  sol.u_star.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const PoissonLocalSolution local = solve_local_poisson(sys.locals[e], sol.trace);
    sol.c[e] = local.c;
    sol.q[e] = local.q;
    sol.u_star[e] = recover_first_order(sys.locals[e], sol.trace);
  }
  return sol;
}

PoissonSolution solve_poisson(const Mesh& mesh, const PoissonProblem& problem, SolverKind solver) {
  return solve_poisson(mesh, compute_geometry(mesh), problem, solver);
}

}  // namespace fcfv
