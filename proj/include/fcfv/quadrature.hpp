#pragma once

#include <array>
#include <vector>

#include "fcfv/mesh.hpp"
#include "fcfv/types.hpp"

namespace fcfv {

struct QuadraturePoint {
  Point x;
  double weight;
};

using QuadratureRule = std::vector<QuadraturePoint>;

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
std::vector<std::pair<double, double>> gauss_legendre(int n);

/// Reference rule on the unit simplex: reference coordinates and weights
/// normalised to sum to one.
struct SimplexRule {
  std::vector<Eigen::Vector3d> ref;
  std::vector<double> weights;
};

/// Rules exact for polynomials of total degree <= `degree`. Degrees up to 2
/// use symmetric rules; higher degrees use collapsed Gauss-Legendre products.
const SimplexRule& triangle_rule(int degree);
const SimplexRule& tetrahedron_rule(int degree);

/// Triangle (n = 3) or tetrahedron (n = 4).
struct Simplex {
  std::array<Point, 4> p;
  int n = 0;

  /// Signed area (2D, from x-y coordinates) or signed volume.
  double signed_measure() const;
  Point centroid() const;
};

/// Decomposition used for volumes, centroids and cell quadrature.
///
/// QUA splits along diagonal 0-2 and PYR along base diagonal 0-2. HEX and PRI
/// connect the vertex average to each triangulated face. Sub-simplices of a
/// valid cell have positive measure.
std::vector<Simplex> sub_simplices(CellType type, const std::vector<Point>& pts);

/// Map a reference rule onto a simplex; weights carry |measure|.
void append_simplex_quadrature(const Simplex& s, int degree, QuadratureRule& out);

QuadratureRule cell_quadrature(CellType type, const std::vector<Point>& pts, int degree);

/// 2x2 Gauss rule on the bilinear map of a quadrilateral face in 3D;
/// exact for linear integrands on planar faces.
QuadratureRule quad_face_gauss(const std::vector<Point>& pts);

template <typename F>
auto integrate(const QuadratureRule& rule, F&& f) {
  using R = std::decay_t<decltype(f(rule.front().x))>;
  R sum = f(rule.front().x) * rule.front().weight;
  for (std::size_t q = 1; q < rule.size(); ++q) sum += f(rule[q].x) * rule[q].weight;
  return sum;
}

}  // namespace fcfv
