#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fcfv/verification.hpp"

namespace fcfv {

/// sqrt(|cell|^-1 integral (u - u*)^2) for the linear field with coefficients
/// c and the constant u*; `gram` holds the second moments of the basis.
double error_indicator(const BasisMatrix& gram, double volume, const BasisVector& c, double u_star);

/// Vector version: RMS over the nsd velocity components of component-major c.
double error_indicator(const BasisMatrix& gram, double volume, int nsd, const Eigen::VectorXd& c,
                       const Eigen::Vector3d& u_star);

std::vector<double> error_indicators(const Mesh& mesh, const MeshGeometry& geo,
                                     const PoissonSolution& s);
std::vector<double> error_indicators(const Mesh& mesh, const MeshGeometry& geo,
                                     const StokesSolution& s);

/// Richardson size law h (eps / E)^(1 / (1 + nsd/2)) without limiting.
double target_size_raw(double h, double indicator, double eps, int nsd);

/// Size law with growth and shrink limited to a factor `cap`; E = 0 grows by `cap`.
double target_size(double h, double indicator, double eps, int nsd, double cap = 2.0);

struct RefineStats {
  /// Bisection sweeps performed.
  int sweeps = 0;
  /// Targets raised to the minimum allowed size.
  Index clamped = 0;
};

/// Conforming newest-vertex bisection of a triangular mesh until every cell
/// diameter is at most its target. Targets are per input cell and inherited
/// by the children; boundary tags are inherited by the halves of an edge.
///
/// Each input triangle's refinement edge is its longest edge; bisection
/// children take the new midpoint as their newest vertex. Cells are never
/// coarsened.
Mesh refine_triangular_mesh(const Mesh& mesh, const std::vector<double>& target,
                            double min_size = 1e-6, RefineStats* stats = nullptr);

/// FNV-1a 64-bit hash of the vertex coordinates and the cell connectivity.
std::uint64_t mesh_checksum(const Mesh& mesh);

/// Per-vertex isotropic size: inverse-distance average of the incident
/// cells' targets (distance from the vertex to the cell centroid).
std::vector<double> vertex_size_field(const Mesh& mesh, const MeshGeometry& geo,
                                      const std::vector<double>& cell_target);

/// {"version": 1, "mesh_checksum": "<16 hex digits>", "iteration": i, "sizes": [...]}
void write_size_field(std::ostream& out, const Mesh& mesh, const std::vector<double>& sizes,
                      int iteration);

struct AdaptOptions {
  double eps = 1e-2;
  int max_iter = 10;
  /// 0 selects the dimension default.
  double tau = 0.0;
  /// Interpret eps relative to the largest cell-centroid value of u (|u| for Stokes).
  bool relative = false;
  double cap = 2.0;
  double min_size = 1e-6;
  /// Size-field file written when the mesh cannot be refined natively.
  std::string size_field_path = "size_field.json";
};

struct AdaptIteration {
  int iter = 0;
  Index n_cells = 0;
  double max_E = 0.0;
  /// Largest per-cell RMS error of u* and u (NaN without an exact solution).
  double max_err_u_star = 0.0;
  double max_err_u = 0.0;
  double efficiency = 0.0;
};

struct AdaptState {
  double eps = 0.0;
  /// Last iteration's per-cell data.
  std::vector<double> E;
  std::vector<double> h;
  std::vector<double> h_target;
  std::vector<AdaptIteration> history;
  /// Iterations performed.
  int n_ia = 0;
  bool converged = false;
  /// True when the loop stopped after writing a size field for an external remesher.
  bool exported_size_field = false;
  Index clamped = 0;
};

struct PoissonAdaptResult {
  AdaptState state;
  Mesh mesh;
  PoissonSolution solution;
};

struct StokesAdaptResult {
  AdaptState state;
  Mesh mesh;
  StokesSolution solution;
};

/// solve -> indicate -> size -> remesh until max E <= eps or max_iter solves.
PoissonAdaptResult adapt_loop(const PoissonCase& c, const Mesh& initial, const AdaptOptions& opts);
StokesAdaptResult adapt_loop(const StokesCase& c, const Mesh& initial, const AdaptOptions& opts);

/// iter,n_cells,max_E,max_err_u_star,max_err_u,efficiency
void write_history_csv(std::ostream& out, const AdaptState& state);

}  // namespace fcfv
