#include "fcfv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fcfv {

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule[static_cast<std::size_t>(i)] = {0.5 * (x + 1.0), v0 * v0};  // weight 2 v0^2 scaled by 1/2
  }
  return rule;
}

namespace {

SimplexRule collapsed_triangle(int degree) {
  const int k = (degree + 3) / 2;
  const auto gl = gauss_legendre(k);
  SimplexRule r;
  for (auto [u, wu] : gl) {
    for (auto [v, wv] : gl) {
      r.ref.emplace_back(u, v * (1.0 - u), 0.0);
      r.weights.push_back(2.0 * wu * wv * (1.0 - u));
    }
  }
  return r;
}

SimplexRule collapsed_tetrahedron(int degree) {
  const int k = (degree + 4) / 2;
  const auto gl = gauss_legendre(k);
  SimplexRule r;
  for (auto [u, wu] : gl) {
    for (auto [v, wv] : gl) {
      for (auto [w, ww] : gl) {
        r.ref.emplace_back(u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v));
        r.weights.push_back(6.0 * wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
    }
  }
  return r;
}

SimplexRule make_triangle_rule(int degree) {
  if (degree <= 1) return {{Eigen::Vector3d(1.0 / 3.0, 1.0 / 3.0, 0.0)}, {1.0}};
  if (degree == 2) {
    return {{Eigen::Vector3d(1.0 / 6.0, 1.0 / 6.0, 0.0), Eigen::Vector3d(2.0 / 3.0, 1.0 / 6.0, 0.0),
             Eigen::Vector3d(1.0 / 6.0, 2.0 / 3.0, 0.0)},
            {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  }
  return collapsed_triangle(degree);
}

SimplexRule make_tetrahedron_rule(int degree) {
  if (degree <= 1) return {{Eigen::Vector3d(0.25, 0.25, 0.25)}, {1.0}};
  if (degree == 2) {
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    return {{Eigen::Vector3d(b, b, b), Eigen::Vector3d(a, b, b), Eigen::Vector3d(b, a, b),
             Eigen::Vector3d(b, b, a)},
            {0.25, 0.25, 0.25, 0.25}};
  }
  return collapsed_tetrahedron(degree);
}

template <typename Maker>
const SimplexRule& cached_rule(std::map<int, SimplexRule>& cache, std::mutex& m, int degree,
                               Maker make) {
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

}  // namespace

const SimplexRule& triangle_rule(int degree) {
  static std::map<int, SimplexRule> cache;
  static std::mutex m;
  return cached_rule(cache, m, degree, make_triangle_rule);
}

const SimplexRule& tetrahedron_rule(int degree) {
  static std::map<int, SimplexRule> cache;
  static std::mutex m;
  return cached_rule(cache, m, degree, make_tetrahedron_rule);
}

double Simplex::signed_measure() const {
  if (n == 3) {
    const Point a = p[1] - p[0];
    const Point b = p[2] - p[0];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  return (p[1] - p[0]).cross(p[2] - p[0]).dot(p[3] - p[0]) / 6.0;
}

Point Simplex::centroid() const {
  Point c = Point::Zero();
  for (int i = 0; i < n; ++i) c += p[static_cast<std::size_t>(i)];
  return c / n;
}

std::vector<Simplex> sub_simplices(CellType type, const std::vector<Point>& pts) {
  auto tri = [&](int a, int b, int c) { return Simplex{{pts[a], pts[b], pts[c], Point::Zero()}, 3}; };
  switch (type) {
    case CellType::Tri: return {tri(0, 1, 2)};
    case CellType::Qua: return {tri(0, 1, 2), tri(0, 2, 3)};
    case CellType::Tet: return {Simplex{{pts[0], pts[1], pts[2], pts[3]}, 4}};
    case CellType::Pyr:
      return {Simplex{{pts[0], pts[1], pts[2], pts[4]}, 4},
              Simplex{{pts[0], pts[2], pts[3], pts[4]}, 4}};
    case CellType::Hex:
    case CellType::Pri: {
      Point apex = Point::Zero();
      for (const Point& x : pts) apex += x;
      apex /= static_cast<double>(pts.size());
      std::vector<Simplex> out;
      for (const auto& f : local_faces(type)) {
        const Point& f0 = pts[static_cast<std::size_t>(f[0])];
        const Point& f1 = pts[static_cast<std::size_t>(f[1])];
        const Point& f2 = pts[static_cast<std::size_t>(f[2])];
        out.push_back(Simplex{{f0, f2, f1, apex}, 4});
        if (f.size() == 4) {
          const Point& f3 = pts[static_cast<std::size_t>(f[3])];
          out.push_back(Simplex{{f0, f3, f2, apex}, 4});
        }
      }
      return out;
    }
  }
  return {};
}

void append_simplex_quadrature(const Simplex& s, int degree, QuadratureRule& out) {
  const SimplexRule& rule = s.n == 3 ? triangle_rule(degree) : tetrahedron_rule(degree);
  const double measure = std::abs(s.signed_measure());
  for (std::size_t q = 0; q < rule.ref.size(); ++q) {
    Point x = s.p[0];
    for (int i = 1; i < s.n; ++i) x += rule.ref[q][i - 1] * (s.p[static_cast<std::size_t>(i)] - s.p[0]);
    out.push_back({x, rule.weights[q] * measure});
  }
}

QuadratureRule cell_quadrature(CellType type, const std::vector<Point>& pts, int degree) {
  QuadratureRule out;
  for (const Simplex& s : sub_simplices(type, pts)) append_simplex_quadrature(s, degree, out);
  return out;
}

QuadratureRule quad_face_gauss(const std::vector<Point>& pts) {
  const auto gl = gauss_legendre(2);
  QuadratureRule out;
  out.reserve(4);
  for (auto [xi, wxi] : gl) {
    for (auto [eta, weta] : gl) {
      const Point x = (1 - xi) * (1 - eta) * pts[0] + xi * (1 - eta) * pts[1] + xi * eta * pts[2] +
                      (1 - xi) * eta * pts[3];
      const Point dxi = (1 - eta) * (pts[1] - pts[0]) + eta * (pts[2] - pts[3]);
      const Point deta = (1 - xi) * (pts[3] - pts[0]) + xi * (pts[2] - pts[1]);
      out.push_back({x, wxi * weta * dxi.cross(deta).norm()});
    }
  }
  return out;
}

}  // namespace fcfv
