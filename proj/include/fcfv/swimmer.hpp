#pragma once

#include "fcfv/types.hpp"

namespace fcfv {

/// Helical microswimmer geometry. Use reference() for a complete parameter
/// set; beta, lambda0 and lambda1 have no meaningful member defaults.
struct SwimmerParams {
  double L = 1.0;
  double A_b = 1.0 / 27.0;
  double C1 = 1.75;
  double C2 = 2.75;
  double alpha = 0.7;
  double kappa = 4.0 * 3.14159265358979323846;
  double beta = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double sigma = 0.02;
  double gamma = 0.0;

  /// Reference parameters scaled to the body length L.
  static SwimmerParams reference(double L = 1.0, double gamma = 0.0);
};

struct SwimmerFrame {
  Point tangent;
  Point normal;
  Point binormal;
};

Point swimmer_centreline(const SwimmerParams& p, double lambda);

/// Analytic Serret-Frenet frame of the helical centreline.
SwimmerFrame swimmer_frame(const SwimmerParams& p, double lambda);

/// Smoothed step 1/2 (1 - erf((lambda - lambda_s) / (sqrt(2) sigma))).
double swimmer_step(const SwimmerParams& p, double lambda, double lambda_s);

/// Long-axis radius, vanishing at the tips lambda = +-L.
double swimmer_radius_b(const SwimmerParams& p, double lambda);
double swimmer_radius_n(const SwimmerParams& p, double lambda);

/// Surface point S(lambda, theta). Throws std::domain_error for |lambda| > L.
Point evaluate_swimmer_surface(const SwimmerParams& p, double lambda, double theta);

}  // namespace fcfv
