#include <cmath>

#include <gtest/gtest.h>

#include "fcfv/generators.hpp"
#include "fcfv/stokes.hpp"
#include "fcfv/transforms.hpp"

using namespace fcfv;

namespace {

struct FamilyCase {
  int nsd;
  MeshFamily family;
};

const std::vector<FamilyCase> kAllFamilies{
    {2, MeshFamily::Tri}, {2, MeshFamily::Qua}, {2, MeshFamily::Hybrid},
    {3, MeshFamily::Tet}, {3, MeshFamily::Hex}, {3, MeshFamily::Pri},
    {3, MeshFamily::Pyr}, {3, MeshFamily::Hybrid}};

// u_b = u0_b + sum_a G_ab x_a with trace(G) = 0, constant pressure p0.
StokesProblem linear_problem(int nsd, double nu, double p0, double tau) {
  Eigen::Matrix3d g;
  Eigen::Vector3d u0(0.4, -0.3, 0.2);
  if (nsd == 2) {
    g << 0.7, -1.2, 0, 0.5, -0.7, 0, 0, 0, 0;
    u0[2] = 0;
  } else {
    g << 0.7, -1.2, 0.3, 0.5, -0.2, 0.9, -0.4, 0.6, -0.5;
  }
  StokesProblem pb;
  pb.nu = nu;
  pb.tau = tau;
  pb.source = [](const Point&) { return Eigen::Vector3d::Zero(); };
  pb.dirichlet = [=](const Point& x) -> Eigen::Vector3d { return u0 + g.transpose() * x; };
  pb.neumann = [=](const Point&, const Point& n) -> Eigen::Vector3d {
    return nu * g.transpose() * n - p0 * n;
  };
  return pb;
}

Eigen::Matrix3d linear_gradient(int nsd) {
  const StokesProblem pb = linear_problem(nsd, 1.0, 0.0, 1.0);
  Eigen::Matrix3d g;
  const Eigen::Vector3d base = pb.dirichlet(Point::Zero());
  for (int a = 0; a < 3; ++a) g.row(a) = (pb.dirichlet(Point::Unit(a)) - base).transpose();
  return g;
}

Mesh unit_square_cell(const BoundaryRule& rule = all_dirichlet) {
  return Mesh(2, {Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)},
              {{CellType::Qua, {0, 1, 2, 3}}}, rule);
}

}  // namespace

TEST(StokesLocal, BlocksEqualScalarMatrix) {
  const Mesh m = unit_square_cell();
  const MeshGeometry geo = compute_geometry(m);
  const StokesLocalOperators ops =
      assemble_local_stokes(m, geo, 0, linear_problem(2, 1.0, 0.0, 1.0), number_traces(m));
  Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
  expected.diagonal() << 4.0, 0.5, 0.5;
  EXPECT_NEAR((ops.op.m - expected).norm(), 0, 1e-15);
}

TEST(StokesLocal, ZeroDirichletData) {
  const Mesh m = unit_square_cell();
  StokesProblem pb = linear_problem(2, 1.0, 0.0, 1.0);
  pb.dirichlet = [](const Point&) { return Eigen::Vector3d::Zero(); };
  const StokesLocalOperators ops = assemble_local_stokes(m, compute_geometry(m), 0, pb, number_traces(m));
  EXPECT_EQ(ops.z.norm(), 0.0);
  EXPECT_EQ(ops.b.norm(), 0.0);
  const StokesLocalSolution s = solve_local_stokes(ops, 1.0, Eigen::VectorXd(), 0.25);
  EXPECT_EQ(s.c.norm(), 0.0);
  EXPECT_EQ(s.L.norm(), 0.0);
  EXPECT_EQ(s.p, 0.25);
}

TEST(StokesLocal, ConstantVelocity) {
  const Mesh m = unit_square_cell(neumann_on_plane(1, 0.0));
  StokesProblem pb = linear_problem(2, 1.0, 0.0, 3.0);
  pb.dirichlet = [](const Point&) { return Eigen::Vector3d(1.5, -2, 0); };
  const TraceNumbering num = number_traces(m);
  const StokesLocalOperators ops = assemble_local_stokes(m, compute_geometry(m), 0, pb, num);
  Eigen::VectorXd trace(2 * num.count);
  for (Index d = 0; d < num.count; ++d) trace.segment(2 * d, 2) << 1.5, -2;
  const StokesLocalSolution s = solve_local_stokes(ops, 1.0, trace, 0.0);
  Eigen::VectorXd expected(6);
  expected << 1.5, 0, 0, -2, 0, 0;
  EXPECT_NEAR((s.c - expected).norm(), 0, 1e-14);
  EXPECT_NEAR(s.L.norm(), 0, 1e-14);
}

TEST(StokesGlobal, CouplingBlockAndDirichletRhs) {
  const Mesh m = unit_square_cell(neumann_on_plane(1, 0.0));
  const MeshGeometry geo = compute_geometry(m);
  const StokesSystem sys = assemble_global_stokes(m, geo, linear_problem(2, 1.0, 0.0, 1.0));
  ASSERT_EQ(sys.n_velocity, 2);
  EXPECT_FALSE(sys.mean_pressure_constraint);
  // The single Neumann face is the bottom edge, outward normal (0, -1).
  EXPECT_EQ(sys.A.coeff(0, 2), 0.0);
  EXPECT_EQ(sys.A.coeff(1, 2), -1.0);
  EXPECT_EQ(sys.A.coeff(2, 1), -1.0);
  double expected = 0.0;
  for (int j = 1; j < 4; ++j) {
    const FaceGeometry& f = geo.cell(0).faces[j];
    expected -= f.area * sys.locals[0].face_data[j].dot(f.normal);
  }
  EXPECT_NEAR(sys.f[2], expected, 1e-15);
}

TEST(StokesGlobal, ExactOnLinearsAllFamilies) {
  for (double nu : {1.0, 0.25}) {
    for (const auto& fc : kAllFamilies) {
      SCOPED_TRACE(std::string(to_string(fc.family)) + std::to_string(fc.nsd));
      const Mesh m =
          generate_structured_mesh(fc.nsd, fc.family, 2, neumann_on_plane(fc.nsd - 1, 0.0));
      const MeshGeometry geo = compute_geometry(m);
      const double p0 = 1.7;
      const StokesProblem pb = linear_problem(fc.nsd, nu, p0, default_tau(fc.nsd));
      const StokesSolution s = solve_stokes(m, geo, pb);
      const Eigen::Matrix3d g = linear_gradient(fc.nsd);
      const int mm = basis_size(fc.nsd);
      EXPECT_LE(s.symmetry_defect, 1e-12);
      EXPECT_LE(s.incompressibility_residual, 1e-10);
      for (Index e = 0; e < m.num_cells(); ++e) {
        const Eigen::Vector3d uc = pb.dirichlet(geo.cell(e).centroid);
        for (int a = 0; a < fc.nsd; ++a) {
          EXPECT_NEAR(s.c[e][a * mm], uc[a], 1e-10);
          EXPECT_LE((s.c[e].segment(a * mm + 1, fc.nsd) - g.col(a).head(fc.nsd)).norm(), 1e-9);
        }
        EXPECT_LE((s.L[e] + std::sqrt(nu) * g).norm(), 1e-9);
        EXPECT_NEAR(s.p[e], p0, 1e-9);
      }
    }
  }
}

TEST(StokesGlobal, FullyDirichletUsesMeanPressure) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Tri, 2);
  const StokesProblem pb = linear_problem(2, 1.0, 3.0, 1e4);
  const MeshGeometry geo = compute_geometry(m);
  const StokesSolution s = solve_stokes(m, geo, pb);
  EXPECT_TRUE(s.mean_pressure_constraint);
  double mean = 0.0;
  for (Index e = 0; e < m.num_cells(); ++e) mean += geo.cell(e).volume * s.p[e];
  EXPECT_NEAR(mean, 0.0, 1e-12);
  for (Index e = 0; e < m.num_cells(); ++e) EXPECT_NEAR(s.p[e], 0.0, 1e-9);
  EXPECT_LE(s.incompressibility_residual, 1e-10);
}

TEST(StokesGlobal, SymmetricOnDistortedMeshes) {
  for (const auto& fc : kAllFamilies) {
    const Mesh m = distort_mesh(
        generate_structured_mesh(fc.nsd, fc.family, 2, neumann_on_plane(fc.nsd - 1, 0.0)), 4);
    const StokesSystem sys = assemble_global_stokes(m, compute_geometry(m),
                                                    linear_problem(fc.nsd, 1.0, 0.0, 10.0));
    EXPECT_LE(symmetry_defect(sys.A), 1e-12);
  }
}
