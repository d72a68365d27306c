#include "fcfv/verification.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "fcfv/errors.hpp"
#include "fcfv/geometry.hpp"
#include "fcfv/quadrature.hpp"
#include "fcfv/transforms.hpp"

namespace fcfv {

namespace {

// ---------------------------------------------------------------------------
// Manufactured fields

PoissonCase exp_trig_case(int nsd) {
  const double alpha = 0.1, beta = 0.3;
  Point a(5.1, -6.2, 1.8);
  Point b(4.3, 3.4, 1.7);
  if (nsd == 2) {
    a[2] = 0.0;
    b[2] = 0.0;
  }
  auto phi = [=](const Point& x) { return alpha * std::sin(a.dot(x)) + beta * std::cos(b.dot(x)); };
  auto grad_phi = [=](const Point& x) -> Point {
    return alpha * std::cos(a.dot(x)) * a - beta * std::sin(b.dot(x)) * b;
  };
  PoissonCase c;
  c.name = nsd == 2 ? "poisson2d" : "poisson3d";
  c.nsd = nsd;
  c.u = [=](const Point& x) { return std::exp(phi(x)); };
  c.grad = [=](const Point& x) -> Eigen::Vector3d { return std::exp(phi(x)) * grad_phi(x); };
  c.source = [=](const Point& x) {
    const Point g = grad_phi(x);
    const double lap = -alpha * std::sin(a.dot(x)) * a.squaredNorm() -
                       beta * std::cos(b.dot(x)) * b.squaredNorm();
    return -std::exp(phi(x)) * (g.squaredNorm() + lap);
  };
  c.boundary = neumann_on_plane(nsd - 1, 0.0);
  return c;
}

PoissonCase gaussian_case() {
  const double a = 100.0;
  const Point centre(0.7, 0.7, 0.0);
  PoissonCase c;
  c.name = "gaussian";
  c.nsd = 2;
  auto bump = [=](const Point& x) { return std::exp(-a * (x - centre).head<2>().squaredNorm()); };
  c.u = [=](const Point& x) { return 1.0 + bump(x); };
  c.grad = [=](const Point& x) -> Eigen::Vector3d {
    Point d = x - centre;
    d[2] = 0.0;
    return -2.0 * a * bump(x) * d;
  };
  c.source = [=](const Point& x) {
    const double r2 = (x - centre).head<2>().squaredNorm();
    return -bump(x) * (4.0 * a * a * r2 - 4.0 * a);
  };
  c.boundary = all_dirichlet;
  return c;
}

StokesCase polynomial_stokes_case() {
  auto f = [](double t) { return t * t * (1 - t) * (1 - t); };
  auto f1 = [](double t) { return 2 * t - 6 * t * t + 4 * t * t * t; };
  auto f2 = [](double t) { return 2 - 12 * t + 12 * t * t; };
  auto f3 = [](double t) { return -12 + 24 * t; };
  StokesCase c;
  c.name = "stokes2d";
  c.nsd = 2;
  c.u = [=](const Point& x) -> Eigen::Vector3d {
    return {f(x[0]) * f1(x[1]), -f(x[1]) * f1(x[0]), 0.0};
  };
  c.grad = [=](const Point& x) {
    Tensor g = Tensor::Zero();
    g(0, 0) = f1(x[0]) * f1(x[1]);
    g(1, 0) = f(x[0]) * f2(x[1]);
    g(0, 1) = -f(x[1]) * f2(x[0]);
    g(1, 1) = -f1(x[0]) * f1(x[1]);
    return g;
  };
  c.p = [](const Point& x) { return x[0] * (1 - x[0]); };
  c.source = [=](const Point& x) -> Eigen::Vector3d {
    const double lap1 = f2(x[0]) * f1(x[1]) + f(x[0]) * f3(x[1]);
    const double lap2 = -(f(x[1]) * f3(x[0]) + f2(x[1]) * f1(x[0]));
    return {-lap1 + (1 - 2 * x[0]), -lap2, 0.0};
  };
  c.boundary = neumann_on_plane(1, 0.0);
  return c;
}

StokesCase trig_stokes_case() {
  StokesCase c;
  c.name = "stokes3d";
  c.nsd = 3;
  c.u = [](const Point& x) -> Eigen::Vector3d {
    const double s1 = std::sin(x[0] - 0.5), c1 = std::cos(x[0] - 0.5);
    const double s3 = std::sin(x[2] - 0.5), c3 = std::cos(x[2] - 0.5);
    return {0.5 + (x[2] - x[1]) * s1,
            1 - x[1] * (x[2] - 0.5 * x[1]) * c1 - x[1] * (x[0] - 0.5 * x[1]) * c3,
            0.5 + (x[0] - x[1]) * s3};
  };
  c.grad = [](const Point& x) {
    const double s1 = std::sin(x[0] - 0.5), c1 = std::cos(x[0] - 0.5);
    const double s3 = std::sin(x[2] - 0.5), c3 = std::cos(x[2] - 0.5);
    const double y = x[1];
    const double w1 = y * x[2] - 0.5 * y * y;
    const double w3 = y * x[0] - 0.5 * y * y;
    Tensor g;
    g(0, 0) = (x[2] - y) * c1;
    g(1, 0) = -s1;
    g(2, 0) = s1;
    g(0, 1) = w1 * s1 - y * c3;
    g(1, 1) = -(x[2] - y) * c1 - (x[0] - y) * c3;
    g(2, 1) = -y * c1 + w3 * s3;
    g(0, 2) = s3;
    g(1, 2) = -s3;
    g(2, 2) = (x[0] - y) * c3;
    return g;
  };
  c.p = [](const Point& x) { return x[0] * (1 - x[0]) + x[1] * (1 - x[1]) + x[2] * (1 - x[2]); };
  c.source = [](const Point& x) -> Eigen::Vector3d {
    const double s1 = std::sin(x[0] - 0.5), c1 = std::cos(x[0] - 0.5);
    const double s3 = std::sin(x[2] - 0.5), c3 = std::cos(x[2] - 0.5);
    const double y = x[1];
    const double lap1 = -(x[2] - y) * s1;
    const double lap2 = (y * x[2] - 0.5 * y * y) * c1 + c1 + c3 + (y * x[0] - 0.5 * y * y) * c3;
    const double lap3 = -(x[0] - y) * s3;
    return Eigen::Vector3d(-lap1, -lap2, -lap3) +
           Eigen::Vector3d(1 - 2 * x[0], 1 - 2 * x[1], 1 - 2 * x[2]);
  };
  c.boundary = neumann_on_plane(2, 0.0);
  return c;
}

Point random_point(std::mt19937_64& rng, int nsd) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point x(unit(rng), unit(rng), 0.0);
  if (nsd == 3) x[2] = unit(rng);
  return x;
}

// ---------------------------------------------------------------------------
// Study helpers

double pair_order(const LevelResult& a, const LevelResult& b, double LevelResult::*err) {
  return std::log(a.*err / b.*err) / std::log(a.h / b.h);
}

double ls_order(const std::vector<const LevelResult*>& ok, double LevelResult::*err) {
  if (ok.size() < 2) return 0.0;
  Eigen::MatrixXd a(ok.size(), 2);
  Eigen::VectorXd y(ok.size());
  for (std::size_t i = 0; i < ok.size(); ++i) {
    a(static_cast<Index>(i), 0) = std::log(ok[i]->h);
    a(static_cast<Index>(i), 1) = 1.0;
    y[static_cast<Index>(i)] = std::log(ok[i]->*err);
  }
  return a.colPivHouseholderQr().solve(y)[0];
}

void fill_orders(ConvergenceReport& r) {
  std::vector<const LevelResult*> ok;
  for (const LevelResult& l : r.levels) {
    if (!l.failed) ok.push_back(&l);
  }
  for (std::size_t i = 1; i < ok.size(); ++i) {
    r.order_u.push_back(pair_order(*ok[i - 1], *ok[i], &LevelResult::err_u));
    if (r.stokes) {
      r.order_p.push_back(pair_order(*ok[i - 1], *ok[i], &LevelResult::err_p));
      r.order_L.push_back(pair_order(*ok[i - 1], *ok[i], &LevelResult::err_L));
    } else {
      r.order_q.push_back(pair_order(*ok[i - 1], *ok[i], &LevelResult::err_q));
    }
  }
  r.ls_order_u = ls_order(ok, &LevelResult::err_u);
  if (r.stokes) {
    r.ls_order_p = ls_order(ok, &LevelResult::err_p);
    r.ls_order_L = ls_order(ok, &LevelResult::err_L);
  } else {
    r.ls_order_q = ls_order(ok, &LevelResult::err_q);
  }
}

double last_or_nan(const std::vector<double>& v) {
  return v.empty() ? std::nan("") : v.back();
}

double tau_or_default(double tau, int nsd) { return tau > 0.0 ? tau : default_tau(nsd); }

struct PoissonErrors {
  double u, q;
};

PoissonErrors poisson_errors(const Mesh& m, const MeshGeometry& geo, const PoissonCase& c,
                             const PoissonSolution& s) {
  return {l2_error(m, linear_field(geo, c.nsd, s.c), exact_field(c.u)).value,
          l2_error(m, constant_field(s.q, c.nsd), exact_field(c.flux(), c.nsd)).value};
}

struct StokesErrors {
  double u, p, L;
};

StokesErrors stokes_errors(const Mesh& m, const MeshGeometry& geo, const StokesCase& c,
                           const StokesSolution& s) {
  return {l2_error(m, linear_vector_field(geo, c.nsd, s.c), exact_field(c.u, c.nsd)).value,
          l2_error(m, constant_field(s.p), exact_field(c.p)).value,
          l2_error(m, constant_field(s.L, c.nsd), exact_field(c.mixed(), c.nsd)).value};
}

}  // namespace

// ---------------------------------------------------------------------------
// Cases

PoissonProblem PoissonCase::problem(double tau) const {
  PoissonProblem pb;
  pb.source = source;
  pb.dirichlet = u;
  pb.neumann = [g = grad](const Point& x, const Point& n) { return n.dot(g(x)); };
  pb.tau = tau_or_default(tau, nsd);
  return pb;
}

VectorField PoissonCase::flux() const {
  return [g = grad](const Point& x) -> Eigen::Vector3d { return -g(x); };
}

StokesProblem StokesCase::problem(double tau) const {
  StokesProblem pb;
  pb.nu = nu;
  pb.source = source;
  pb.dirichlet = u;
  pb.neumann = [g = grad, p = p, nu = nu](const Point& x, const Point& n) -> Eigen::Vector3d {
    return nu * g(x).transpose() * n - p(x) * n;
  };
  pb.tau = tau_or_default(tau, nsd);
  return pb;
}

TensorField StokesCase::mixed() const {
  return [g = grad, s = std::sqrt(nu)](const Point& x) -> Tensor { return -s * g(x); };
}

std::vector<std::string> poisson_case_names() { return {"poisson2d", "poisson3d", "gaussian"}; }
std::vector<std::string> stokes_case_names() { return {"stokes2d", "stokes3d"}; }

bool is_stokes_case(const std::string& name) {
  for (const auto& n : stokes_case_names()) {
    if (n == name) return true;
  }
  return false;
}

PoissonCase poisson_case(const std::string& name) {
  if (name == "poisson2d") return exp_trig_case(2);
  if (name == "poisson3d") return exp_trig_case(3);
  if (name == "gaussian") return gaussian_case();
  throw ConfigError("unknown Poisson case '" + name + "'");
}

StokesCase stokes_case(const std::string& name) {
  if (name == "stokes2d") return polynomial_stokes_case();
  if (name == "stokes3d") return trig_stokes_case();
  throw ConfigError("unknown Stokes case '" + name + "'");
}

PoissonCase linear_poisson_case(int nsd) {
  Point g(1.1, -0.7, 0.4);
  if (nsd == 2) g[2] = 0.0;
  PoissonCase c;
  c.name = "linear" + std::to_string(nsd) + "d";
  c.nsd = nsd;
  c.u = [=](const Point& x) { return 0.3 + g.dot(x); };
  c.grad = [=](const Point&) -> Eigen::Vector3d { return g; };
  c.source = [](const Point&) { return 0.0; };
  c.boundary = neumann_on_plane(nsd - 1, 0.0);
  return c;
}

StokesCase linear_stokes_case(int nsd, double nu) {
  Tensor g;
  Eigen::Vector3d u0(0.4, -0.3, 0.2);
  if (nsd == 2) {
    g << 0.7, -1.2, 0, 0.5, -0.7, 0, 0, 0, 0;
    u0[2] = 0.0;
  } else {
    g << 0.7, -1.2, 0.3, 0.5, -0.2, 0.9, -0.4, 0.6, -0.5;
  }
  StokesCase c;
  c.name = "linear-stokes" + std::to_string(nsd) + "d";
  c.nsd = nsd;
  c.nu = nu;
  c.u = [=](const Point& x) -> Eigen::Vector3d { return u0 + g.transpose() * x; };
  c.grad = [=](const Point&) { return g; };
  c.p = [](const Point&) { return 1.7; };
  c.source = [](const Point&) -> Eigen::Vector3d { return Eigen::Vector3d::Zero(); };
  c.boundary = neumann_on_plane(nsd - 1, 0.0);
  return c;
}

CaseCheck check_case(const PoissonCase& c, int points, std::uint64_t seed) {
  const double h = 1e-6;
  std::mt19937_64 rng(seed);
  CaseCheck out;
  for (int k = 0; k < points; ++k) {
    const Point x = random_point(rng, c.nsd);
    const Point g = c.grad(x);
    Point fd = Point::Zero();
    double lap = 0.0;
    for (int a = 0; a < c.nsd; ++a) {
      const Point e = h * Point::Unit(a);
      fd[a] = (c.u(x + e) - c.u(x - e)) / (2 * h);
      lap += (c.grad(x + e)[a] - c.grad(x - e)[a]) / (2 * h);
    }
    out.gradient = std::max(out.gradient, (fd - g).norm() / std::max(1.0, g.norm()));
    const double s = c.source(x);
    out.pde = std::max(out.pde, std::abs(s + lap) / std::max(1.0, std::abs(s)));
  }
  return out;
}

CaseCheck check_case(const StokesCase& c, int points, std::uint64_t seed) {
  const double h = 1e-6;
  std::mt19937_64 rng(seed);
  CaseCheck out;
  for (int k = 0; k < points; ++k) {
    const Point x = random_point(rng, c.nsd);
    const Tensor g = c.grad(x);
    Tensor fd = Tensor::Zero();
    Eigen::Vector3d lap = Eigen::Vector3d::Zero();
    Eigen::Vector3d gp = Eigen::Vector3d::Zero();
    for (int a = 0; a < c.nsd; ++a) {
      const Point e = h * Point::Unit(a);
      fd.row(a) = ((c.u(x + e) - c.u(x - e)) / (2 * h)).transpose();
      lap += ((c.grad(x + e).row(a) - c.grad(x - e).row(a)) / (2 * h)).transpose();
      gp[a] = (c.p(x + e) - c.p(x - e)) / (2 * h);
    }
    out.gradient = std::max(out.gradient, (fd - g).norm() / std::max(1.0, g.norm()));
    const Eigen::Vector3d s = c.source(x);
    const Eigen::Vector3d r = s - (-c.nu * lap + gp);
    out.pde = std::max(out.pde, r.norm() / std::max(1.0, s.norm()));
    out.divergence = std::max(out.divergence, std::abs(g.trace()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms

NormResult l2_error(const Mesh& mesh, const CellEvaluator& numeric, const ExactEvaluator& exact) {
  double err2 = 0.0, ref2 = 0.0;
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    const QuadratureRule rule = cell_quadrature(mesh.cell(e).type, mesh.cell_points(e), 4);
    for (const QuadraturePoint& qp : rule) {
      const CellFieldValue ex = exact(qp.x);
      err2 += qp.weight * (numeric(e, qp.x) - ex).squaredNorm();
      ref2 += qp.weight * ex.squaredNorm();
    }
  }
  NormResult r;
  r.absolute = std::sqrt(err2);
  r.exact_norm = std::sqrt(ref2);
  r.absolute_only = !(r.exact_norm > 0.0);
  r.value = r.absolute_only ? r.absolute : r.absolute / r.exact_norm;
  return r;
}

std::vector<double> cell_rms_errors(const Mesh& mesh, const MeshGeometry& geo,
                                    const CellEvaluator& numeric, const ExactEvaluator& exact) {
  std::vector<double> out(static_cast<std::size_t>(mesh.num_cells()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    const QuadratureRule rule = cell_quadrature(mesh.cell(e).type, mesh.cell_points(e), 4);
    double err2 = 0.0;
    for (const QuadraturePoint& qp : rule) {
      err2 += qp.weight * (numeric(e, qp.x) - exact(qp.x)).squaredNorm();
    }
    out[static_cast<std::size_t>(e)] = std::sqrt(err2 / geo.cell(e).volume);
  }
  return out;
}

CellEvaluator linear_field(const MeshGeometry& geo, int nsd, const std::vector<BasisVector>& c) {
  return [&geo, nsd, &c](Index e, const Point& x) {
    CellFieldValue v(1);
    v[0] = evaluate_linear(c[static_cast<std::size_t>(e)], nsd, geo.cell(e).centroid, x);
    return v;
  };
}

CellEvaluator linear_vector_field(const MeshGeometry& geo, int nsd,
                                  const std::vector<Eigen::VectorXd>& c) {
  return [&geo, nsd, &c](Index e, const Point& x) {
    const int m = basis_size(nsd);
    const BasisVector n = basis_values(nsd, geo.cell(e).centroid, x);
    const Eigen::VectorXd& ce = c[static_cast<std::size_t>(e)];
    CellFieldValue v(nsd);
    for (int a = 0; a < nsd; ++a) v[a] = ce.segment(a * m, m).dot(n);
    return v;
  };
}

CellEvaluator constant_field(const std::vector<double>& v) {
  return [&v](Index e, const Point&) {
    CellFieldValue out(1);
    out[0] = v[static_cast<std::size_t>(e)];
    return out;
  };
}

CellEvaluator constant_field(const std::vector<Point>& v, int nsd) {
  return [&v, nsd](Index e, const Point&) {
    return CellFieldValue(v[static_cast<std::size_t>(e)].head(nsd));
  };
}

CellEvaluator constant_field(const std::vector<Tensor>& v, int nsd) {
  return [&v, nsd](Index e, const Point&) {
    const Tensor& t = v[static_cast<std::size_t>(e)];
    CellFieldValue out(nsd * nsd);
    for (int a = 0; a < nsd; ++a) {
      for (int b = 0; b < nsd; ++b) out[a * nsd + b] = t(a, b);
    }
    return out;
  };
}

ExactEvaluator exact_field(const ScalarField& f) {
  return [f](const Point& x) {
    CellFieldValue v(1);
    v[0] = f(x);
    return v;
  };
}

ExactEvaluator exact_field(const VectorField& f, int nsd) {
  return [f, nsd](const Point& x) { return CellFieldValue(f(x).head(nsd)); };
}

ExactEvaluator exact_field(const TensorField& f, int nsd) {
  return [f, nsd](const Point& x) {
    const Tensor t = f(x);
    CellFieldValue out(nsd * nsd);
    for (int a = 0; a < nsd; ++a) {
      for (int b = 0; b < nsd; ++b) out[a * nsd + b] = t(a, b);
    }
    return out;
  };
}

// ---------------------------------------------------------------------------
// Studies

double ConvergenceReport::finest_order_u() const { return last_or_nan(order_u); }
double ConvergenceReport::finest_order_q() const { return last_or_nan(order_q); }
double ConvergenceReport::finest_order_p() const { return last_or_nan(order_p); }
double ConvergenceReport::finest_order_L() const { return last_or_nan(order_L); }

Mesh study_mesh(int nsd, MeshFamily family, int level, const BoundaryRule& rule,
                const StudyOptions& opts) {
  Mesh m = generate_structured_mesh(nsd, family, level, rule);
  if (opts.distort_seed) m = distort_mesh(m, *opts.distort_seed + static_cast<std::uint64_t>(level));
  if (opts.stretch > 1.0) m = stretch_mesh(m, opts.stretch);
  return m;
}

ConvergenceReport convergence_study(const PoissonCase& c, MeshFamily family,
                                    const std::vector<int>& levels, const StudyOptions& opts) {
  ConvergenceReport r;
  r.case_name = c.name;
  r.family = family;
  const PoissonProblem pb = c.problem(opts.tau);
  for (int level : levels) {
    LevelResult l;
    l.level = level;
    try {
      const Mesh m = study_mesh(c.nsd, family, level, c.boundary, opts);
      const MeshGeometry geo = compute_geometry(m);
      l.h = geo.h;
      l.n_cells = m.num_cells();
      l.planarity_defect = max_planarity_defect(m);
      const PoissonSolution s = solve_poisson(m, geo, pb, opts.solver);
      l.n_trace_dof = s.numbering.count;
      l.t_assemble = s.t_assemble;
      l.t_solve = s.t_solve;
      l.symmetry_defect = s.symmetry_defect;
      const PoissonErrors err = poisson_errors(m, geo, c, s);
      l.err_u = err.u;
      l.err_q = err.q;
    } catch (const std::exception& ex) {
      l.failed = true;
      l.error = ex.what();
    }
    r.levels.push_back(std::move(l));
  }
  fill_orders(r);
  return r;
}

ConvergenceReport convergence_study(const StokesCase& c, MeshFamily family,
                                    const std::vector<int>& levels, const StudyOptions& opts) {
  ConvergenceReport r;
  r.case_name = c.name;
  r.family = family;
  r.stokes = true;
  const StokesProblem pb = c.problem(opts.tau);
  // The saddle-point system is indefinite; LDLT maps to the Schur complement path.
  const SolverKind solver = opts.solver == SolverKind::LDLT ? SolverKind::SchurCG : opts.solver;
  for (int level : levels) {
    LevelResult l;
    l.level = level;
    try {
      const Mesh m = study_mesh(c.nsd, family, level, c.boundary, opts);
      const MeshGeometry geo = compute_geometry(m);
      l.h = geo.h;
      l.n_cells = m.num_cells();
      l.planarity_defect = max_planarity_defect(m);
      const StokesSolution s = solve_stokes(m, geo, pb, solver);
      l.n_trace_dof = c.nsd * s.numbering.count + m.num_cells();
      l.t_assemble = s.t_assemble;
      l.t_solve = s.t_solve;
      l.symmetry_defect = s.symmetry_defect;
      l.incompressibility = s.incompressibility_residual;
      const StokesErrors err = stokes_errors(m, geo, c, s);
      l.err_u = err.u;
      l.err_p = err.p;
      l.err_L = err.L;
    } catch (const std::exception& ex) {
      l.failed = true;
      l.error = ex.what();
    }
    r.levels.push_back(std::move(l));
  }
  fill_orders(r);
  return r;
}

void write_csv(std::ostream& out, const ConvergenceReport& r) {
  out.precision(10);
  if (r.stokes) {
    out << "level,h,n_cells,n_trace_dof,err_u,err_p,err_L,t_assemble_s,t_solve_s,order_u,order_p,"
           "order_L\n";
  } else {
    out << "level,h,n_cells,n_trace_dof,err_u,err_q,t_assemble_s,t_solve_s,order_u,order_q\n";
  }
  std::size_t k = 0;  // index into the pairwise orders
  bool seen = false;
  for (const LevelResult& l : r.levels) {
    out << l.level << ',' << l.h << ',' << l.n_cells << ',' << l.n_trace_dof << ',';
    if (l.failed) {
      out << (r.stokes ? ",,,,,,,\n" : ",,,,,\n");
      continue;
    }
    out << l.err_u << ',';
    if (r.stokes) {
      out << l.err_p << ',' << l.err_L << ',';
    } else {
      out << l.err_q << ',';
    }
    out << l.t_assemble << ',' << l.t_solve << ',';
    if (seen && k < r.order_u.size()) {
      out << r.order_u[k] << ',';
      if (r.stokes) {
        out << r.order_p[k] << ',' << r.order_L[k];
      } else {
        out << r.order_q[k];
      }
      ++k;
    } else {
      out << (r.stokes ? ",," : ",");
    }
    seen = true;
    out << '\n';
  }
}

TauSweepReport tau_sweep(const PoissonCase& c, MeshFamily family, const std::vector<int>& levels,
                         const std::vector<double>& taus) {
  TauSweepReport r;
  for (int level : levels) {
    const Mesh m = generate_structured_mesh(c.nsd, family, level, c.boundary);
    const MeshGeometry geo = compute_geometry(m);
    for (double tau : taus) {
      if (!(tau > 0.0)) throw ConfigError("stabilisation values must be positive");
      const PoissonSolution s = solve_poisson(m, geo, c.problem(tau));
      const PoissonErrors err = poisson_errors(m, geo, c, s);
      TauSweepRow row;
      row.level = level;
      row.tau = tau;
      row.err_u = err.u;
      row.err_q = err.q;
      row.symmetry_defect = s.symmetry_defect;
      r.rows.push_back(row);
    }
  }
  return r;
}

TauSweepReport tau_sweep(const StokesCase& c, MeshFamily family, const std::vector<int>& levels,
                         const std::vector<double>& taus) {
  TauSweepReport r;
  r.stokes = true;
  for (int level : levels) {
    const Mesh m = generate_structured_mesh(c.nsd, family, level, c.boundary);
    const MeshGeometry geo = compute_geometry(m);
    for (double tau : taus) {
      if (!(tau > 0.0)) throw ConfigError("stabilisation values must be positive");
      const StokesSolution s = solve_stokes(m, geo, c.problem(tau));
      const StokesErrors err = stokes_errors(m, geo, c, s);
      TauSweepRow row;
      row.level = level;
      row.tau = tau;
      row.err_u = err.u;
      row.err_p = err.p;
      row.err_L = err.L;
      row.incompressibility = s.incompressibility_residual;
      row.symmetry_defect = s.symmetry_defect;
      r.rows.push_back(row);
    }
  }
  return r;
}

void write_csv(std::ostream& out, const TauSweepReport& r) {
  out.precision(10);
  out << (r.stokes ? "level,tau,err_u,err_p,err_L\n" : "level,tau,err_u,err_q\n");
  for (const TauSweepRow& row : r.rows) {
    out << row.level << ',' << row.tau << ',' << row.err_u << ',';
    if (r.stokes) {
      out << row.err_p << ',' << row.err_L << '\n';
    } else {
      out << row.err_q << '\n';
    }
  }
}

CpuTimeTrend cpu_time_trend(const ConvergenceReport& report) {
  CpuTimeTrend t;
  double total = 0.0;
  for (const LevelResult& l : report.levels) {
    if (l.failed) continue;
    total += l.t_assemble + l.t_solve;
    t.cumulative_time.push_back(total);
    t.err_u.push_back(l.err_u);
  }
  t.monotone = t.err_u.size() >= 2;
  for (std::size_t i = 1; i < t.err_u.size(); ++i) {
    if (!(t.err_u[i] < t.err_u[i - 1]) || !(t.cumulative_time[i] > t.cumulative_time[i - 1])) {
      t.monotone = false;
    }
  }
  return t;
}

void write_csv(std::ostream& out, const CpuTimeTrend& t) {
  out.precision(10);
  out << "cumulative_time_s,err_u\n";
  for (std::size_t i = 0; i < t.err_u.size(); ++i) {
    out << t.cumulative_time[i] << ',' << t.err_u[i] << '\n';
  }
}

NodalMatrix legacy_nodal_local_matrix(CellType type, const std::vector<double>& g, double tau) {
  NodalMatrix out;
  if (type == CellType::Tri) {
    if (g.size() != 3) throw std::invalid_argument("a triangle has three edges");
    out.m.resize(3, 3);
    out.m << g[0] + g[2], g[0], g[2],
             g[0], g[1] + g[0], g[1],
             g[2], g[1], g[2] + g[1];
  } else if (type == CellType::Qua) {
    if (g.size() != 4) throw std::invalid_argument("a quadrilateral has four edges");
    out.m.resize(4, 4);
    out.m << g[0] + g[3], g[0], 0.0, g[3],
             g[0], g[1] + g[0], g[1], 0.0,
             0.0, g[1], g[2] + g[1], g[2],
             g[3], 0.0, g[2], g[3] + g[2];
  } else {
    throw std::invalid_argument("nodal matrices are defined for triangles and quadrilaterals");
  }
  out.m *= tau / 4.0;
  out.determinant = out.m.determinant();
  return out;
}

}  // namespace fcfv
