#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace fcfv {

using Index = std::int64_t;

/// Points are always stored in 3D; 2D meshes keep z = 0.
using Point = Eigen::Vector3d;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::Vector3d(const Point&)>;

/// Boundary data that depends on the outward normal of the face (Neumann fluxes).
using ScalarFluxField = std::function<double(const Point& x, const Point& normal)>;
using VectorFluxField = std::function<Eigen::Vector3d(const Point& x, const Point& normal)>;

}  // namespace fcfv
