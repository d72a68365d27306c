#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "fcfv/adaptivity.hpp"
#include "fcfv/errors.hpp"
#include "fcfv/transforms.hpp"

using namespace fcfv;

namespace {

BasisMatrix centred_square_gram() {
  const std::vector<Point> pts{Point(-0.5, -0.5, 0), Point(0.5, -0.5, 0), Point(0.5, 0.5, 0),
                               Point(-0.5, 0.5, 0)};
  return gram_matrix(2, CellType::Qua, pts, Point::Zero());
}

double boundary_length(const Mesh& m) {
  double len = 0.0;
  for (const Face& f : m.faces()) {
    if (f.is_boundary()) len += (m.vertex(f.verts[0]) - m.vertex(f.verts[1])).norm();
  }
  return len;
}

}  // namespace

TEST(Indicator, ExactLinearFieldIsZero) {
  BasisVector c(3);
  c << 0.4, 0.0, 0.0;
  EXPECT_NEAR(error_indicator(centred_square_gram(), 1.0, c, 0.4), 0.0, 1e-15);
}

TEST(Indicator, ConstantOffset) {
  BasisVector c(3);
  c << 0.4, 0.0, 0.0;
  EXPECT_NEAR(error_indicator(centred_square_gram(), 1.0, c, 0.4 - 0.03), 0.03, 1e-15);
}

TEST(Indicator, UnitSlopeOnCentredSquare) {
  // u = x against u* = 0: mean of x^2 over [-1/2, 1/2]^2 is 1/12.
  BasisVector c(3);
  c << 0.0, 1.0, 0.0;
  EXPECT_NEAR(error_indicator(centred_square_gram(), 1.0, c, 0.0), 1.0 / std::sqrt(12.0), 1e-14);
}

TEST(Indicator, VectorIsComponentRms) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
  c[1] = 1.0;  // first component slope in x
  const double e = error_indicator(centred_square_gram(), 1.0, 2, c, Eigen::Vector3d::Zero());
  EXPECT_NEAR(e, std::sqrt(1.0 / 12.0 / 2.0), 1e-14);
}

TEST(TargetSize, SizeLaw) {
  EXPECT_NEAR(target_size_raw(0.1, 4e-2, 1e-2, 2), 0.05, 1e-15);
  EXPECT_NEAR(target_size_raw(1.0, 1e-2 * std::pow(2.0, 2.5), 1e-2, 3), 0.5, 1e-14);
  EXPECT_NEAR(target_size(0.1, 1e4, 1e-2, 2), 0.05, 1e-15);
  EXPECT_NEAR(target_size(0.1, 1e-9, 1e-2, 2), 0.2, 1e-15);
  EXPECT_NEAR(target_size(0.1, 0.0, 1e-2, 2), 0.2, 1e-15);
}

TEST(Refine, UniformHalving) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Tri, 2);
  const MeshGeometry g = compute_geometry(m);
  std::vector<double> target;
  for (const CellGeometry& c : g.cells) target.push_back(0.5 * c.diameter);
  RefineStats st;
  const Mesh r = refine_triangular_mesh(m, target, 1e-6, &st);
  const MeshGeometry gr = compute_geometry(r);
  for (const CellGeometry& c : gr.cells) EXPECT_LE(c.diameter, 0.5 * g.h * (1 + 1e-12));
  double area = 0.0;
  for (const CellGeometry& c : gr.cells) area += c.volume;
  EXPECT_NEAR(area, 1.0, 1e-13);
  // A hanging node would leave an unmatched edge on the boundary list.
  EXPECT_NEAR(boundary_length(r), 4.0, 1e-13);
  EXPECT_GE(st.sweeps, 1);
}

TEST(Refine, LargeTargetsKeepTheMesh) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Tri, 2);
  const std::vector<double> target(static_cast<std::size_t>(m.num_cells()), 10.0);
  const Mesh r = refine_triangular_mesh(m, target);
  EXPECT_EQ(r.num_cells(), m.num_cells());
  EXPECT_EQ(r.vertices(), m.vertices());
}

TEST(Refine, LocalTargetStaysConforming) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Tri, 2);
  std::vector<double> target(static_cast<std::size_t>(m.num_cells()), 10.0);
  target[0] = 0.02;
  const Mesh r = refine_triangular_mesh(m, target);
  EXPECT_GT(r.num_cells(), m.num_cells());
  EXPECT_NEAR(boundary_length(r), 4.0, 1e-13);
}

TEST(Refine, RejectsQuadrilaterals) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Qua, 1);
  EXPECT_THROW(refine_triangular_mesh(m, std::vector<double>(m.num_cells(), 0.1)), MeshError);
}

TEST(Adapt, LooseToleranceStopsAfterOneSolve) {
  const PoissonCase c = poisson_case("gaussian");
  AdaptOptions o;
  o.eps = 1e3;
  const PoissonAdaptResult r = adapt_loop(c, generate_structured_mesh(2, MeshFamily::Tri, 2, c.boundary), o);
  EXPECT_EQ(r.state.n_ia, 1);
  EXPECT_TRUE(r.state.converged);
  ASSERT_EQ(r.state.history.size(), 1u);
  std::ostringstream csv;
  write_history_csv(csv, r.state);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "iter,n_cells,max_E,max_err_u_star,max_err_u,efficiency");
}

TEST(Adapt, RefinementReducesIndicator) {
  const PoissonCase c = poisson_case("gaussian");
  AdaptOptions o;
  o.eps = 1e-2;
  o.max_iter = 3;
  const PoissonAdaptResult r = adapt_loop(c, generate_structured_mesh(2, MeshFamily::Tri, 2, c.boundary), o);
  ASSERT_EQ(r.state.history.size(), 3u);
  EXPECT_LT(r.state.history.back().max_E, r.state.history.front().max_E);
  EXPECT_GT(r.state.history.back().n_cells, r.state.history.front().n_cells);
}

TEST(Adapt, QuadrilateralMeshExportsSizeField) {
  const auto path = std::filesystem::temp_directory_path() / "fcfv_test_size_field.json";
  std::filesystem::remove(path);
  const PoissonCase c = poisson_case("gaussian");
  AdaptOptions o;
  o.size_field_path = path.string();
  const Mesh m = generate_structured_mesh(2, MeshFamily::Qua, 2, c.boundary);
  const PoissonAdaptResult r = adapt_loop(c, m, o);
  EXPECT_TRUE(r.state.exported_size_field);
  EXPECT_FALSE(r.state.converged);
  ASSERT_TRUE(std::filesystem::exists(path));
}

TEST(SizeField, JsonLayout) {
  const Mesh m = generate_structured_mesh(2, MeshFamily::Tri, 1);
  const MeshGeometry g = compute_geometry(m);
  const std::vector<double> target(static_cast<std::size_t>(m.num_cells()), 0.3);
  const std::vector<double> sizes = vertex_size_field(m, g, target);
  ASSERT_EQ(static_cast<Index>(sizes.size()), m.num_vertices());
  for (double s : sizes) EXPECT_NEAR(s, 0.3, 1e-15);
  std::ostringstream out;
  write_size_field(out, m, sizes, 4);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j.at("version").get<int>(), 1);
  EXPECT_EQ(j.at("iteration").get<int>(), 4);
  EXPECT_EQ(j.at("sizes").size(), sizes.size());
  const std::string sum = j.at("mesh_checksum").get<std::string>();
  EXPECT_EQ(sum.size(), 16u);
  EXPECT_EQ(sum.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(SizeField, ChecksumSeesCoordinates) {
  const Mesh a = generate_structured_mesh(2, MeshFamily::Tri, 1);
  const Mesh b = distort_mesh(a, 3);
  EXPECT_NE(mesh_checksum(a), mesh_checksum(b));
}
