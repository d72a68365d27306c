#include "fcfv/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "fcfv/errors.hpp"
#include "fcfv/geometry.hpp"
#include "fcfv/quadrature.hpp"

namespace fcfv {

namespace {

std::int64_t coordinate_key(double x) { return std::llround(x * 1e9); }

bool cell_valid(const Mesh& mesh, Index e, const std::vector<Point>& verts) {
  const Cell& c = mesh.cell(e);
  std::vector<Point> pts;
  pts.reserve(c.verts.size());
  for (Index v : c.verts) pts.push_back(verts[static_cast<std::size_t>(v)]);
  if (c.type == CellType::Qua) {
    // Convexity: all four corner triangles positive.
    for (int k = 0; k < 4; ++k) {
      const Simplex s{{pts[k], pts[(k + 1) % 4], pts[(k + 2) % 4], Point::Zero()}, 3};
      if (!(s.signed_measure() > 0.0)) return false;
    }
    return true;
  }
  for (const Simplex& s : sub_simplices(c.type, pts)) {
    if (!(s.signed_measure() > 0.0)) return false;
  }
  return true;
}

bool has_quad_faces_3d(const Mesh& mesh) {
  if (mesh.nsd() != 3) return false;
  return std::any_of(mesh.cells().begin(), mesh.cells().end(),
                     [](const Cell& c) { return c.type != CellType::Tet; });
}

Mesh distort_vertices(const Mesh& mesh, std::mt19937_64& rng, double bound, DistortStats& st) {
  std::vector<bool> on_boundary(static_cast<std::size_t>(mesh.num_vertices()), false);
  for (const Face& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    for (Index v : f.verts) on_boundary[static_cast<std::size_t>(v)] = true;
  }
  std::vector<std::vector<Index>> incident(static_cast<std::size_t>(mesh.num_vertices()));
  for (Index e = 0; e < mesh.num_cells(); ++e) {
    for (Index v : mesh.cell(e).verts) incident[static_cast<std::size_t>(v)].push_back(e);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> verts = mesh.vertices();
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    Point dir(normal(rng), normal(rng), mesh.nsd() == 3 ? normal(rng) : 0.0);
    const double radius = unit(rng) * bound;
    if (on_boundary[static_cast<std::size_t>(v)]) continue;
    const double len = dir.norm();
    if (len == 0.0) continue;
    dir /= len;
    const Point original = verts[static_cast<std::size_t>(v)];
    bool accepted = false;
    double step = radius;
    for (int attempt = 0; attempt < 5 && !accepted; ++attempt, step *= 0.5) {
      verts[static_cast<std::size_t>(v)] = original + step * dir;
      accepted = std::all_of(incident[static_cast<std::size_t>(v)].begin(),
                             incident[static_cast<std::size_t>(v)].end(),
                             [&](Index e) { return cell_valid(mesh, e, verts); });
      if (accepted) st.max_displacement = std::max(st.max_displacement, step);
    }
    if (accepted) {
      ++st.moved;
    } else {
      verts[static_cast<std::size_t>(v)] = original;
      ++st.unmoved;
    }
  }
  return mesh.with_vertices(std::move(verts));
}

struct PlaneFamily {
  std::map<std::int64_t, int> index;
  std::vector<double> value;
  // Offset and slope coefficients, zero on the boundary planes.
  std::vector<Eigen::Vector3d> coeff;
};

Mesh distort_planes(const Mesh& mesh, std::mt19937_64& rng, double bound, DistortStats& st) {
  std::array<PlaneFamily, 3> fam;
  for (const Point& x : mesh.vertices()) {
    for (int a = 0; a < 3; ++a) fam[a].index.emplace(coordinate_key(x[a]), 0);
  }
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (int a = 0; a < 3; ++a) {
    for (auto& [key, idx] : fam[a].index) {
      idx = static_cast<int>(fam[a].value.size());
      const double val = static_cast<double>(key) * 1e-9;
      fam[a].value.push_back(val);
      Eigen::Vector3d c(sym(rng), sym(rng), sym(rng));
      if (std::abs(val) < 1e-9 || std::abs(val - 1.0) < 1e-9) c.setZero();
      fam[a].coeff.push_back(c * bound);
    }
  }

  auto place = [&](double t) {
    std::vector<Point> out(mesh.vertices().size());
    for (std::size_t v = 0; v < out.size(); ++v) {
      const Point& x = mesh.vertices()[v];
      const int ix = fam[0].index.at(coordinate_key(x[0]));
      const int iy = fam[1].index.at(coordinate_key(x[1]));
      const int iz = fam[2].index.at(coordinate_key(x[2]));
      const Eigen::Vector3d& cx = fam[0].coeff[static_cast<std::size_t>(ix)];
      const Eigen::Vector3d& cy = fam[1].coeff[static_cast<std::size_t>(iy)];
      const Eigen::Vector3d& cz = fam[2].coeff[static_cast<std::size_t>(iz)];
      // x = X + t(a + b(y - 1/2)), y = Y + t(a + b(x - 1/2)),
      // z = Z + t(a + b(x - 1/2) + c(y - 1/2)).
      Eigen::Matrix3d m;
      m << 1.0, -t * cx[1], 0.0, -t * cy[1], 1.0, 0.0, -t * cz[1], -t * cz[2], 1.0;
      const Eigen::Vector3d rhs(x[0] + t * (cx[0] - 0.5 * cx[1]), x[1] + t * (cy[0] - 0.5 * cy[1]),
                                x[2] + t * (cz[0] - 0.5 * cz[1] - 0.5 * cz[2]));
      out[v] = m.partialPivLu().solve(rhs);
    }
    return out;
  };
  auto max_disp = [&](const std::vector<Point>& verts) {
    double d = 0.0;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      d = std::max(d, (verts[v] - mesh.vertices()[v]).norm());
    }
    return d;
  };

  double t = 1.0;
  std::vector<Point> verts = place(t);
  for (int it = 0; it < 50 && max_disp(verts) > bound; ++it) {
    t *= 0.999 * bound / max_disp(verts);
    verts = place(t);
  }
  for (int attempt = 0; attempt < 10; ++attempt) {
    bool ok = max_disp(verts) <= bound;
    for (Index e = 0; ok && e < mesh.num_cells(); ++e) ok = cell_valid(mesh, e, verts);
    if (ok) {
      st.max_displacement = max_disp(verts);
      st.boundary_sliding = true;
      for (std::size_t v = 0; v < verts.size(); ++v) {
        if (verts[v] != mesh.vertices()[v]) ++st.moved;
      }
      return mesh.with_vertices(std::move(verts));
    }
    t *= 0.5;
    verts = place(t);
  }
  st.unmoved = mesh.num_vertices();
  return mesh;
}

double cell_stretch(const Cell& c, const std::vector<Point>& verts) {
  double longest = 0.0;
  double shortest = std::numeric_limits<double>::max();
  for (auto [a, b] : local_edges(c.type)) {
    const double len = (verts[static_cast<std::size_t>(c.verts[static_cast<std::size_t>(a)])] -
                        verts[static_cast<std::size_t>(c.verts[static_cast<std::size_t>(b)])])
                           .norm();
    longest = std::max(longest, len);
    shortest = std::min(shortest, len);
  }
  return longest / shortest;
}

double stretching_of(const Mesh& mesh, const std::vector<Point>& verts) {
  double s = 1.0;
  for (const Cell& c : mesh.cells()) s = std::max(s, cell_stretch(c, verts));
  return s;
}

}  // namespace

Mesh distort_mesh(const Mesh& mesh, std::uint64_t seed, DistortStats* stats) {
  DistortStats st;
  st.bound = 0.25 * min_edge_length(mesh);
  std::mt19937_64 rng(seed);
  Mesh out = has_quad_faces_3d(mesh) ? distort_planes(mesh, rng, st.bound, st)
                                     : distort_vertices(mesh, rng, st.bound, st);
  if (stats) *stats = st;
  return out;
}

double stretching_factor(const Mesh& mesh) { return stretching_of(mesh, mesh.vertices()); }

Mesh stretch_mesh(const Mesh& mesh, double s) {
  if (!(s >= 1.0)) throw MeshError("stretching factor must be at least 1");
  if (s == 1.0) return mesh;
  const int axis = mesh.nsd() - 1;
  const double base = stretching_factor(mesh);
  if (s < base) {
    throw MeshError("requested stretching " + std::to_string(s) +
                    " is below the mesh's own stretching " + std::to_string(base));
  }
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const Point& x : mesh.vertices()) {
    lo = std::min(lo, x[axis]);
    hi = std::max(hi, x[axis]);
  }
  if (!(hi > lo)) throw MeshError("mesh has no extent along the stretched axis");

  // Geometric grading toward the lower end: (exp(k t) - 1) / (exp(k) - 1).
  auto mapped = [&](double k) {
    std::vector<Point> verts = mesh.vertices();
    for (Point& x : verts) {
      const double t = (x[axis] - lo) / (hi - lo);
      x[axis] = lo + (hi - lo) * std::expm1(k * t) / std::expm1(k);
    }
    return verts;
  };

  double a = 1e-8;
  double b = 1.0;
  while (stretching_of(mesh, mapped(b)) < s) {
    b *= 2.0;
    if (b > 512.0) throw MeshError("stretching factor not reachable on this mesh");
  }
  std::vector<Point> best = mapped(b);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    std::vector<Point> verts = mapped(mid);
    const double got = stretching_of(mesh, verts);
    if (std::abs(got / s - 1.0) < 1e-3) {
      best = std::move(verts);
      break;
    }
    if (got < s) {
      a = mid;
    } else {
      b = mid;
      best = std::move(verts);
    }
  }
  return mesh.with_vertices(std::move(best));
}

}  // namespace fcfv
