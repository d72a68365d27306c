#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fcfv/basis.hpp"
#include "fcfv/generators.hpp"
#include "fcfv/quadrature.hpp"

using namespace fcfv;

namespace {

std::vector<Point> unit_square() {
  return {Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)};
}

}  // namespace

TEST(Basis, ValuesAndGradients) {
  const Point c(0.3, -0.2, 0.7);
  const BasisVector n = basis_values(3, c, c);
  EXPECT_EQ(n.size(), 4);
  EXPECT_EQ(n[0], 1.0);
  EXPECT_EQ(n.tail(3).norm(), 0.0);
  const BasisVector m = basis_values(3, c, c + Point(1, 2, 3));
  EXPECT_NEAR((m.tail(3) - Eigen::Vector3d(1, 2, 3)).norm(), 0, 1e-15);
}

TEST(Basis, UnitSquareBottomEdge) {
  const auto pts = unit_square();
  const CellGeometry g = cell_geometry(2, CellType::Qua, pts);
  const FaceBasisIntegrals fi = face_integrals(2, g.centroid, g.faces[0], {pts[0], pts[1]});
  EXPECT_NEAR((fi.r - Eigen::Vector3d(1, 0, -0.5)).norm(), 0, 1e-15);
}

TEST(Basis, EquilateralTriangleEdge) {
  const double s = std::sqrt(3.0);
  std::vector<Point> pts{Point(-0.5, -s / 6, 0), Point(0.5, -s / 6, 0), Point(0, s / 3, 0)};
  const CellGeometry g = cell_geometry(2, CellType::Tri, pts);
  for (int j = 0; j < 3; ++j) {
    const FaceBasisIntegrals fi =
        face_integrals(2, g.centroid, g.faces[j], {pts[j], pts[(j + 1) % 3]});
    EXPECT_NEAR(fi.r[0], 1.0, 1e-15);
  }
}

TEST(Basis, FaceCentroidIdentityOnDistortedQuadFaces) {
  // Planar but non-parallelogram quadrilateral: Gauss integral equals |G| p.
  const std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0),
                               Point(0, 0, 1), Point(1.3, 0, 1), Point(1.3, 0.8, 1),
                               Point(0, 0.8, 1)};
  const CellGeometry g = cell_geometry(3, CellType::Hex, pts);
  for (int j = 0; j < 6; ++j) {
    std::vector<Point> fp;
    for (int lv : local_faces(CellType::Hex)[j]) fp.push_back(pts[lv]);
    const FaceBasisIntegrals fi = face_integrals(3, g.centroid, g.faces[j], fp);
    EXPECT_NEAR((fi.r - g.faces[j].area * fi.p).norm(), 0, 1e-14) << "face " << j;
  }
}

TEST(Basis, SimplexMomentsVanish) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)};
    for (auto& p : pts) p += 0.2 * Point(u(rng), u(rng), u(rng));
    if ((pts[1] - pts[0]).cross(pts[2] - pts[0]).dot(pts[3] - pts[0]) < 0) std::swap(pts[1], pts[2]);
    const CellGeometry g = cell_geometry(3, CellType::Tet, pts);
    const CellBasisIntegrals ci =
        cell_integrals(3, CellType::Tet, pts, g, ScalarField([](const Point&) { return 1.0; }));
    EXPECT_NEAR(ci.moments[0], g.volume, 1e-15);
    EXPECT_NEAR(ci.moments.tail(3).norm(), 0, 1e-15);
  }
}

TEST(Basis, UnitCubeConstantSource) {
  const std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0),
                               Point(0, 0, 1), Point(1, 0, 1), Point(1, 1, 1), Point(0, 1, 1)};
  const CellGeometry g = cell_geometry(3, CellType::Hex, pts);
  const CellBasisIntegrals ci =
      cell_integrals(3, CellType::Hex, pts, g, ScalarField([](const Point&) { return 1.0; }));
  EXPECT_NEAR((ci.source.col(0) - Eigen::Vector4d(1, 0, 0, 0)).norm(), 0, 1e-14);
}

TEST(Basis, UnitSquareLinearSource) {
  const auto pts = unit_square();
  const CellGeometry g = cell_geometry(2, CellType::Qua, pts);
  const CellBasisIntegrals ci =
      cell_integrals(2, CellType::Qua, pts, g, ScalarField([](const Point& x) { return x[0]; }));
  EXPECT_NEAR(ci.source(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(ci.source(1, 0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(ci.source(2, 0), 0.0, 1e-15);
}

TEST(Basis, VectorSourceComponents) {
  const auto pts = unit_square();
  const CellGeometry g = cell_geometry(2, CellType::Qua, pts);
  const CellBasisIntegrals ci = cell_integrals(
      2, CellType::Qua, pts, g, VectorField([](const Point& x) { return Point(x[0], 2.0, 0); }));
  EXPECT_EQ(ci.source.cols(), 2);
  EXPECT_NEAR(ci.source(1, 0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(ci.source(0, 1), 2.0, 1e-15);
}

TEST(Basis, LinearFieldAtFaceCentroids) {
  // p-contraction of a linear field's coefficients gives its face-centroid value.
  for (MeshFamily fam : {MeshFamily::Tet, MeshFamily::Hex, MeshFamily::Pri, MeshFamily::Pyr}) {
    const Mesh m = generate_structured_mesh(3, fam, 2);
    const MeshGeometry geo = compute_geometry(m);
    const Eigen::Vector3d b(0.3, -1.1, 2.0);
    auto u = [&](const Point& x) { return 0.7 + b.dot(x); };
    for (Index e = 0; e < m.num_cells(); ++e) {
      const CellGeometry& g = geo.cell(e);
      BasisVector c(4);
      c << u(g.centroid), b;
      for (const FaceGeometry& f : g.faces) {
        EXPECT_NEAR(basis_values(3, g.centroid, f.centroid).dot(c), u(f.centroid), 1e-14);
      }
    }
  }
}

TEST(Basis, QuadratureConsistency) {
  const std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0),
                               Point(0, 0, 1), Point(1, 0, 1), Point(1, 1, 1), Point(0, 1, 1)};
  for (int degree : {1, 2, 3, 4, 5, 6}) {
    // Exact integral of x^a y^b z^c over the unit cube is 1/((a+1)(b+1)(c+1)).
    const QuadratureRule rule = cell_quadrature(CellType::Hex, pts, degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const int c = degree - a - b;
        const double got = integrate(rule, [&](const Point& x) {
          return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        });
        EXPECT_NEAR(got, 1.0 / ((a + 1.0) * (b + 1.0) * (c + 1.0)), 1e-13)
            << "degree " << degree << " monomial " << a << b << c;
      }
    }
  }
}

TEST(Basis, TriangleRuleExactness) {
  const std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)};
  for (int degree : {1, 2, 3, 4, 6}) {
    const QuadratureRule rule = cell_quadrature(CellType::Qua, pts, degree);
    for (int a = 0; a <= degree; ++a) {
      const int b = degree - a;
      const double got =
          integrate(rule, [&](const Point& x) { return std::pow(x[0], a) * std::pow(x[1], b); });
      EXPECT_NEAR(got, 1.0 / ((a + 1.0) * (b + 1.0)), 1e-13);
    }
  }
}

TEST(Basis, GramMatrixUnitSquare) {
  const auto pts = unit_square();
  const BasisMatrix g = gram_matrix(2, CellType::Qua, pts, Point(0.5, 0.5, 0));
  Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
  expected(0, 0) = 1.0;
  expected(1, 1) = expected(2, 2) = 1.0 / 12.0;
  EXPECT_NEAR((g - expected).norm(), 0, 1e-15);
}

TEST(Projection, Structure) {
  BasisVector p(3);
  p << 1, 0, 0;
  const Eigen::MatrixXd P = projection_matrix(p, 2);
  Eigen::MatrixXd expected(2, 6);
  expected << 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0;
  EXPECT_EQ(P, expected);
  Eigen::VectorXd c(6);
  c << 3, 0, 0, -2, 0, 0;
  EXPECT_NEAR((P * c - Eigen::Vector2d(3, -2)).norm(), 0, 1e-15);
}

TEST(Projection, LinearVelocityAtFaceCentroid) {
  const Point xbar(0.2, 0.4, 0.6);
  const Point xf(0.5, 0.1, 0.9);
  Eigen::Matrix3d grad;
  grad << 1, 2, 3, -1, 0.5, 0, 0.25, -2, 1;
  const Eigen::Vector3d u0(1, -1, 2);
  auto u = [&](const Point& x) -> Eigen::Vector3d { return u0 + grad * x; };
  Eigen::VectorXd c(12);
  for (int a = 0; a < 3; ++a) {
    c[4 * a] = u(xbar)[a];
    c.segment(4 * a + 1, 3) = grad.row(a).transpose();
  }
  const Eigen::MatrixXd P = projection_matrix(basis_values(3, xbar, xf), 3);
  EXPECT_NEAR((P * c - u(xf)).norm(), 0, 1e-14);
}
