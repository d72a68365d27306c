#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcfv/generators.hpp"
#include "fcfv/poisson.hpp"
#include "fcfv/stokes.hpp"

namespace fcfv {

using TensorField = std::function<Tensor(const Point&)>;

/// Exact solution of -laplace(u) = s with its induced data.
struct PoissonCase {
  std::string name;
  int nsd = 2;
  ScalarField u;
  VectorField grad;
  ScalarField source;
  /// Boundary tagging the case was designed for.
  BoundaryRule boundary = all_dirichlet;

  PoissonProblem problem(double tau) const;
  /// Exact flux q = -grad(u).
  VectorField flux() const;
};

/// Exact velocity/pressure pair for -nu laplace(u) + grad(p) = s, div(u) = 0.
struct StokesCase {
  std::string name;
  int nsd = 2;
  double nu = 1.0;
  VectorField u;
  /// (grad u)_ab = d u_b / d x_a.
  TensorField grad;
  ScalarField p;
  VectorField source;
  BoundaryRule boundary = all_dirichlet;

  StokesProblem problem(double tau) const;
  /// Exact mixed variable L = -sqrt(nu) grad(u).
  TensorField mixed() const;
};

/// Registered cases: "poisson2d", "poisson3d", "gaussian" and "stokes2d", "stokes3d".
std::vector<std::string> poisson_case_names();
std::vector<std::string> stokes_case_names();
bool is_stokes_case(const std::string& name);
PoissonCase poisson_case(const std::string& name);
StokesCase stokes_case(const std::string& name);

/// Linear exact fields used for exactness checks (div-free velocity and
/// constant pressure for Stokes). Neumann on the last coordinate plane x = 0.
PoissonCase linear_poisson_case(int nsd);
StokesCase linear_stokes_case(int nsd, double nu = 1.0);

struct CaseCheck {
  /// Largest relative mismatch between the analytic gradient and central differences of u.
  double gradient = 0.0;
  /// Largest strong-form residual of the PDE, relative to max(1, |s|).
  double pde = 0.0;
  /// Stokes only: largest |div u| from the analytic gradient.
  double divergence = 0.0;
};

CaseCheck check_case(const PoissonCase& c, int points = 100, std::uint64_t seed = 1);
CaseCheck check_case(const StokesCase& c, int points = 100, std::uint64_t seed = 1);

struct NormResult {
  /// Relative error, or the absolute one when the exact norm vanishes.
  double value = 0.0;
  double absolute = 0.0;
  double exact_norm = 0.0;
  bool absolute_only = false;
};

/// Componentwise value of a numerical field at a point inside cell e.
using CellFieldValue = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 9, 1>;
using CellEvaluator = std::function<CellFieldValue(Index e, const Point& x)>;
using ExactEvaluator = std::function<CellFieldValue(const Point& x)>;

/// Degree-4 sub-simplex quadrature of |numeric - exact|^2 over the mesh.
NormResult l2_error(const Mesh& mesh, const CellEvaluator& numeric, const ExactEvaluator& exact);

/// Per-cell RMS error sqrt(|cell|^-1 integral |numeric - exact|^2).
std::vector<double> cell_rms_errors(const Mesh& mesh, const MeshGeometry& geo,
                                    const CellEvaluator& numeric, const ExactEvaluator& exact);

/// Adapters for the usual field layouts.
CellEvaluator linear_field(const MeshGeometry& geo, int nsd, const std::vector<BasisVector>& c);
CellEvaluator linear_vector_field(const MeshGeometry& geo, int nsd,
                                  const std::vector<Eigen::VectorXd>& c);
CellEvaluator constant_field(const std::vector<double>& v);
CellEvaluator constant_field(const std::vector<Point>& v, int nsd);
CellEvaluator constant_field(const std::vector<Tensor>& v, int nsd);
ExactEvaluator exact_field(const ScalarField& f);
ExactEvaluator exact_field(const VectorField& f, int nsd);
ExactEvaluator exact_field(const TensorField& f, int nsd);

struct StudyOptions {
  /// 0 selects the dimension default.
  double tau = 0.0;
  /// Random distortion seed; no distortion when empty.
  std::optional<std::uint64_t> distort_seed;
  double stretch = 1.0;
  SolverKind solver = SolverKind::LDLT;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  Index n_cells = 0;
  Index n_trace_dof = 0;
  double err_u = 0.0;
  /// Flux q (Poisson) or pressure (Stokes).
  double err_q = 0.0;
  double err_p = 0.0;
  double err_L = 0.0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  /// Largest symmetry defect and incompressibility residual seen on this level.
  double symmetry_defect = 0.0;
  double incompressibility = 0.0;
  double planarity_defect = 0.0;
  bool failed = false;
  std::string error;
};

struct ConvergenceReport {
  std::string case_name;
  MeshFamily family = MeshFamily::Tri;
  bool stokes = false;
  std::vector<LevelResult> levels;
  /// Pairwise orders between consecutive levels (empty with a single level).
  std::vector<double> order_u, order_q, order_p, order_L;
  /// Least-squares slope of log(err) against log(h) over all levels.
  double ls_order_u = 0.0, ls_order_q = 0.0, ls_order_p = 0.0, ls_order_L = 0.0;

  double finest_order_u() const;
  double finest_order_q() const;
  double finest_order_p() const;
  double finest_order_L() const;
};

/// Builds the family mesh for one level with the case's boundary tags and
/// the optional distortion and stretching.
Mesh study_mesh(int nsd, MeshFamily family, int level, const BoundaryRule& rule,
                const StudyOptions& opts);

ConvergenceReport convergence_study(const PoissonCase& c, MeshFamily family,
                                    const std::vector<int>& levels, const StudyOptions& opts = {});
ConvergenceReport convergence_study(const StokesCase& c, MeshFamily family,
                                    const std::vector<int>& levels, const StudyOptions& opts = {});

/// level,h,n_cells,n_trace_dof,err_u,err_q,t_assemble_s,t_solve_s,order_u,order_q
/// (Stokes: err_p,err_L and order_p,order_L instead of the q columns).
void write_csv(std::ostream& out, const ConvergenceReport& report);

struct TauSweepRow {
  int level = 0;
  double tau = 0.0;
  double err_u = 0.0;
  double err_q = 0.0;
  double err_p = 0.0;
  double err_L = 0.0;
  double incompressibility = 0.0;
  double symmetry_defect = 0.0;
};

struct TauSweepReport {
  bool stokes = false;
  std::vector<TauSweepRow> rows;
};

TauSweepReport tau_sweep(const PoissonCase& c, MeshFamily family, const std::vector<int>& levels,
                         const std::vector<double>& taus);
TauSweepReport tau_sweep(const StokesCase& c, MeshFamily family, const std::vector<int>& levels,
                         const std::vector<double>& taus);
void write_csv(std::ostream& out, const TauSweepReport& report);

/// Error against cumulative assemble + solve time along one family.
struct CpuTimeTrend {
  std::vector<double> cumulative_time;
  std::vector<double> err_u;
  /// Errors strictly decrease as the cumulative time grows.
  bool monotone = false;
};

CpuTimeTrend cpu_time_trend(const ConvergenceReport& report);
void write_csv(std::ostream& out, const CpuTimeTrend& trend);

/// Local matrix of the classical nodal (P1 triangle / Q1 quadrilateral) basis
/// with a constant stabilisation on every edge.
struct NodalMatrix {
  Eigen::MatrixXd m;
  double determinant = 0.0;
};

NodalMatrix legacy_nodal_local_matrix(CellType type, const std::vector<double>& edge_lengths,
                                      double tau);

}  // namespace fcfv
