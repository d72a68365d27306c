#include "fcfv/adaptivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

using EdgeKey = std::pair<Index, Index>;

EdgeKey edge_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Triangle with refinement edge v[0]-v[1] and newest vertex v[2].
struct MarkedTri {
  std::array<Index, 3> v;
  /// Cell of the input mesh this triangle descends from.
  Index parent;
};

double tri_diameter(const std::vector<Point>& x, const MarkedTri& t) {
  auto len = [&](int i, int j) {
    return (x[static_cast<std::size_t>(t.v[i])] - x[static_cast<std::size_t>(t.v[j])]).norm();
  };
  return std::max({len(0, 1), len(1, 2), len(2, 0)});
}

template <typename T>
void fnv_mix(std::uint64_t& h, const T& value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
}

// Problem-specific pieces of the adapt loop.
struct PoissonOps {
  const PoissonCase& c;
  using Solution = PoissonSolution;

  Solution solve(const Mesh& m, const MeshGeometry& geo, double tau) const {
    return solve_poisson(m, geo, c.problem(tau));
  }
  double scale(const Solution& s) const {
    double v = 0.0;
    for (const BasisVector& ce : s.c) v = std::max(v, std::abs(ce[0]));
    return v;
  }
  std::vector<double> err_star(const Mesh& m, const MeshGeometry& geo, const Solution& s) const {
    return cell_rms_errors(m, geo, constant_field(s.u_star), exact_field(c.u));
  }
  std::vector<double> err_u(const Mesh& m, const MeshGeometry& geo, const Solution& s) const {
    return cell_rms_errors(m, geo, linear_field(geo, c.nsd, s.c), exact_field(c.u));
  }
  bool has_exact() const { return static_cast<bool>(c.u); }
};

struct StokesOps {
  const StokesCase& c;
  using Solution = StokesSolution;

  Solution solve(const Mesh& m, const MeshGeometry& geo, double tau) const {
    return solve_stokes(m, geo, c.problem(tau));
  }
  double scale(const Solution& s) const {
    const int mm = basis_size(c.nsd);
    double v = 0.0;
    for (const Eigen::VectorXd& ce : s.c) {
      double n2 = 0.0;
      for (int a = 0; a < c.nsd; ++a) n2 += ce[a * mm] * ce[a * mm];
      v = std::max(v, std::sqrt(n2));
    }
    return v;
  }
  std::vector<double> err_star(const Mesh& m, const MeshGeometry& geo, const Solution& s) const {
    return cell_rms_errors(m, geo, constant_field(s.u_star, c.nsd), exact_field(c.u, c.nsd));
  }
  std::vector<double> err_u(const Mesh& m, const MeshGeometry& geo, const Solution& s) const {
    return cell_rms_errors(m, geo, linear_vector_field(geo, c.nsd, s.c), exact_field(c.u, c.nsd));
  }
  bool has_exact() const { return static_cast<bool>(c.u); }
};

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

bool all_triangles(const Mesh& m) {
  return std::all_of(m.cells().begin(), m.cells().end(),
                     [](const Cell& c) { return c.type == CellType::Tri; });
}

template <typename Ops, typename Result>
Result run_adapt_loop(const Ops& ops, int nsd, const Mesh& initial, const AdaptOptions& opts) {
  if (!(opts.eps > 0.0)) throw ConfigError("adaptive tolerance must be positive");
  if (opts.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  const double tau = opts.tau > 0.0 ? opts.tau : default_tau(nsd);
  Result out;
  out.mesh = initial;
  AdaptState& st = out.state;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const MeshGeometry geo = compute_geometry(out.mesh);
    out.solution = ops.solve(out.mesh, geo, tau);
    st.E = error_indicators(out.mesh, geo, out.solution);
    st.eps = opts.relative ? opts.eps * ops.scale(out.solution) : opts.eps;
    st.h.resize(st.E.size());
    for (std::size_t e = 0; e < st.E.size(); ++e) st.h[e] = geo.cells[e].diameter;

    AdaptIteration rec;
    rec.iter = iter;
    rec.n_cells = out.mesh.num_cells();
    rec.max_E = max_of(st.E);
    if (ops.has_exact()) {
      rec.max_err_u_star = max_of(ops.err_star(out.mesh, geo, out.solution));
      rec.max_err_u = max_of(ops.err_u(out.mesh, geo, out.solution));
      rec.efficiency = rec.max_E > 0.0 ? rec.max_err_u_star / rec.max_E : std::nan("");
    } else {
      rec.max_err_u_star = rec.max_err_u = rec.efficiency = std::nan("");
    }
    st.history.push_back(rec);
    st.n_ia = iter;

    st.h_target.resize(st.E.size());
    for (std::size_t e = 0; e < st.E.size(); ++e) {
      st.h_target[e] = target_size(st.h[e], st.E[e], st.eps, nsd, opts.cap);
    }
    if (rec.max_E <= st.eps) {
      st.converged = true;
      break;
    }
    if (iter == opts.max_iter) break;
    if (!all_triangles(out.mesh)) {
      std::ofstream f(opts.size_field_path);
      if (!f) throw ConfigError("cannot write size field to " + opts.size_field_path);
      write_size_field(f, out.mesh, vertex_size_field(out.mesh, geo, st.h_target), iter);
      st.exported_size_field = true;
      break;
    }
    RefineStats rs;
    out.mesh = refine_triangular_mesh(out.mesh, st.h_target, opts.min_size, &rs);
    st.clamped += rs.clamped;
  }
  return out;
}

}  // namespace

double error_indicator(const BasisMatrix& gram, double volume, const BasisVector& c,
                       double u_star) {
  BasisVector d = c;
  d[0] -= u_star;
  return std::sqrt(std::max(0.0, d.dot(gram * d)) / volume);
}

double error_indicator(const BasisMatrix& gram, double volume, int nsd, const Eigen::VectorXd& c,
                       const Eigen::Vector3d& u_star) {
  const int m = basis_size(nsd);
  double sum = 0.0;
  for (int a = 0; a < nsd; ++a) {
    const double e = error_indicator(gram, volume, c.segment(a * m, m), u_star[a]);
    sum += e * e;
  }
  return std::sqrt(sum / nsd);
}

std::vector<double> error_indicators(const Mesh& mesh, const MeshGeometry& geo,
                                     const PoissonSolution& s) {
  std::vector<double> out(static_cast<std::size_t>(mesh.num_cells()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    const CellGeometry& cg = geo.cell(e);
    const BasisMatrix g = gram_matrix(mesh.nsd(), mesh.cell(e).type, mesh.cell_points(e), cg.centroid);
    const auto k = static_cast<std::size_t>(e);
    out[k] = error_indicator(g, cg.volume, s.c[k], s.u_star[k]);
  }
  return out;
}

std::vector<double> error_indicators(const Mesh& mesh, const MeshGeometry& geo,
                                     const StokesSolution& s) {
  std::vector<double> out(static_cast<std::size_t>(mesh.num_cells()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    const CellGeometry& cg = geo.cell(e);
    const BasisMatrix g = gram_matrix(mesh.nsd(), mesh.cell(e).type, mesh.cell_points(e), cg.centroid);
    const auto k = static_cast<std::size_t>(e);
    out[k] = error_indicator(g, cg.volume, mesh.nsd(), s.c[k], s.u_star[k]);
  }
  return out;
}

double target_size_raw(double h, double indicator, double eps, int nsd) {
  return h * std::pow(eps / indicator, 1.0 / (1.0 + 0.5 * nsd));
}

double target_size(double h, double indicator, double eps, int nsd, double cap) {
  if (!(indicator > 0.0)) return cap * h;
  return std::clamp(target_size_raw(h, indicator, eps, nsd), h / cap, h * cap);
}

Mesh refine_triangular_mesh(const Mesh& mesh, const std::vector<double>& target, double min_size,
                            RefineStats* stats) {
  if (mesh.nsd() != 2 || !all_triangles(mesh)) {
    throw MeshError("native refinement supports triangular meshes only");
  }
  if (static_cast<Index>(target.size()) != mesh.num_cells()) {
    throw std::invalid_argument("one target size per cell is required");
  }
  RefineStats st;
  std::vector<double> own = target;
  for (double& t : own) {
    if (t < min_size) {
      t = min_size;
      ++st.clamped;
    }
  }
  const std::vector<double> vsize = vertex_size_field(mesh, compute_geometry(mesh), own);
  std::vector<Point> x = mesh.vertices();
  // Size field interpolated linearly over the parent cell, never above the
  // parent's own target.
  auto target_of = [&](const MarkedTri& t) {
    const Cell& p = mesh.cell(t.parent);
    const Point c = (x[static_cast<std::size_t>(t.v[0])] + x[static_cast<std::size_t>(t.v[1])] +
                     x[static_cast<std::size_t>(t.v[2])]) / 3.0;
    Eigen::Matrix3d a;
    for (int k = 0; k < 3; ++k) a.col(k) << mesh.vertex(p.verts[k]).head<2>(), 1.0;
    const Eigen::Vector3d bary = a.partialPivLu().solve(Eigen::Vector3d(c[0], c[1], 1.0));
    double h = 0.0;
    for (int k = 0; k < 3; ++k) h += bary[k] * vsize[static_cast<std::size_t>(p.verts[k])];
    return std::min(h, own[static_cast<std::size_t>(t.parent)]);
  };
  std::map<EdgeKey, BoundaryTag> boundary;
  for (const Face& f : mesh.faces()) {
    if (f.is_boundary()) boundary[edge_key(f.verts[0], f.verts[1])] = f.tag;
  }

  std::vector<MarkedTri> tris;
  tris.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    MarkedTri t{{mesh.cell(e).verts[0], mesh.cell(e).verts[1], mesh.cell(e).verts[2]}, e};
    // Rotate so that the longest edge is the refinement edge.
    int longest = 0;
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double len = (x[static_cast<std::size_t>(t.v[k])] - x[static_cast<std::size_t>(t.v[(k + 1) % 3])]).norm();
      if (len > best * (1.0 + 1e-12)) {
        best = len;
        longest = k;
      }
    }
    std::rotate(t.v.begin(), t.v.begin() + longest, t.v.end());
    tris.push_back(t);
  }

  for (;;) {
    std::set<EdgeKey> marked;
    for (const MarkedTri& t : tris) {
      if (tri_diameter(x, t) > target_of(t)) marked.insert(edge_key(t.v[0], t.v[1]));
    }
    if (marked.empty()) break;
    // Closure: a triangle with any marked edge must bisect its refinement edge.
    for (bool changed = true; changed;) {
      changed = false;
      for (const MarkedTri& t : tris) {
        const EdgeKey ref = edge_key(t.v[0], t.v[1]);
        if (marked.count(ref)) continue;
        if (marked.count(edge_key(t.v[1], t.v[2])) || marked.count(edge_key(t.v[2], t.v[0]))) {
          marked.insert(ref);
          changed = true;
        }
      }
    }
    std::map<EdgeKey, Index> mid;
    for (const EdgeKey& k : marked) {
      const Index m = static_cast<Index>(x.size());
      x.push_back(0.5 * (x[static_cast<std::size_t>(k.first)] + x[static_cast<std::size_t>(k.second)]));
      mid[k] = m;
      if (auto it = boundary.find(k); it != boundary.end()) {
        boundary[edge_key(k.first, m)] = it->second;
        boundary[edge_key(m, k.second)] = it->second;
      }
    }
    std::vector<MarkedTri> next;
    next.reserve(tris.size() * 2);
    auto bisect = [&](const MarkedTri& t, auto&& self) -> void {
      const auto it = mid.find(edge_key(t.v[0], t.v[1]));
      if (it == mid.end()) {
        next.push_back(t);
        return;
      }
      const Index m = it->second;
      self(MarkedTri{{t.v[2], t.v[0], m}, t.parent}, self);
      self(MarkedTri{{t.v[1], t.v[2], m}, t.parent}, self);
    };
    for (const MarkedTri& t : tris) bisect(t, bisect);
    tris = std::move(next);
    ++st.sweeps;
  }

  std::vector<Cell> cells;
  cells.reserve(tris.size());
  for (const MarkedTri& t : tris) cells.push_back({CellType::Tri, {t.v[0], t.v[1], t.v[2]}});
  auto rule = [&boundary](const BoundaryFaceInfo& f) {
    const auto it = boundary.find(edge_key(f.verts[0], f.verts[1]));
    return it == boundary.end() ? BoundaryTag::Dirichlet : it->second;
  };
  if (stats) *stats = st;
  return Mesh(2, std::move(x), std::move(cells), rule);
}

std::uint64_t mesh_checksum(const Mesh& mesh) {
  std::uint64_t h = 14695981039346656037ULL;
  fnv_mix(h, mesh.nsd());
  for (const Point& p : mesh.vertices()) {
    for (int a = 0; a < mesh.nsd(); ++a) fnv_mix(h, p[a]);
  }
  for (const Cell& c : mesh.cells()) {
    fnv_mix(h, static_cast<std::uint8_t>(c.type));
    for (Index v : c.verts) fnv_mix(h, v);
  }
  return h;
}

std::vector<double> vertex_size_field(const Mesh& mesh, const MeshGeometry& geo,
                                      const std::vector<double>& cell_target) {
  std::vector<double> num(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  std::vector<double> den(num.size(), 0.0);
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    for (Index v : mesh.cell(e).verts) {
      const double d = std::max((mesh.vertex(v) - geo.cell(e).centroid).norm(), 1e-300);
      num[static_cast<std::size_t>(v)] += cell_target[static_cast<std::size_t>(e)] / d;
      den[static_cast<std::size_t>(v)] += 1.0 / d;
    }
  }
  for (std::size_t v = 0; v < num.size(); ++v) num[v] = den[v] > 0.0 ? num[v] / den[v] : 0.0;
  return num;
}

void write_size_field(std::ostream& out, const Mesh& mesh, const std::vector<double>& sizes,
                      int iteration) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(mesh_checksum(mesh)));
  nlohmann::json j;
  j["version"] = 1;
  j["mesh_checksum"] = hex;
  j["iteration"] = iteration;
  j["sizes"] = sizes;
  out << j.dump(1) << '\n';
}

PoissonAdaptResult adapt_loop(const PoissonCase& c, const Mesh& initial, const AdaptOptions& opts) {
  return run_adapt_loop<PoissonOps, PoissonAdaptResult>(PoissonOps{c}, c.nsd, initial, opts);
}

StokesAdaptResult adapt_loop(const StokesCase& c, const Mesh& initial, const AdaptOptions& opts) {
  return run_adapt_loop<StokesOps, StokesAdaptResult>(StokesOps{c}, c.nsd, initial, opts);
}

void write_history_csv(std::ostream& out, const AdaptState& state) {
  out.precision(10);
  out << "iter,n_cells,max_E,max_err_u_star,max_err_u,efficiency\n";
  for (const AdaptIteration& r : state.history) {
    out << r.iter << ',' << r.n_cells << ',' << r.max_E << ',' << r.max_err_u_star << ','
        << r.max_err_u << ',' << r.efficiency << '\n';
  }
}

}  // namespace fcfv
