#include "fcfv/swimmer.hpp"

#include <cmath>
#include <stdexcept>

namespace fcfv {

SwimmerParams SwimmerParams::reference(double L, double gamma) {
  SwimmerParams p;
  p.L = L;
  p.A_b = L / 27.0;
  p.kappa = 4.0 * M_PI / L;
  p.beta = std::sqrt(1.0 - p.alpha * p.alpha) / p.kappa;
  p.lambda0 = (1.0 - 9.0 / 54.2) * L;
  p.lambda1 = (1.0 - 11.0 / 54.2) * L;
  p.sigma = 0.02 * L;
  p.gamma = gamma;
  return p;
}

Point swimmer_centreline(const SwimmerParams& p, double lambda) {
  return {p.beta * std::cos(p.kappa * lambda), p.beta * std::sin(p.kappa * lambda),
          p.alpha * lambda};
}

SwimmerFrame swimmer_frame(const SwimmerParams& p, double lambda) {
  const double c = std::cos(p.kappa * lambda);
  const double s = std::sin(p.kappa * lambda);
  SwimmerFrame f;
  f.tangent = Point(-p.beta * p.kappa * s, p.beta * p.kappa * c, p.alpha).normalized();
  // The second derivative is horizontal and points to the helix axis.
  f.normal = Point(-c, -s, 0.0);
  f.binormal = f.tangent.cross(f.normal);
  return f;
}

double swimmer_step(const SwimmerParams& p, double lambda, double lambda_s) {
  return 0.5 * (1.0 - std::erf((lambda - lambda_s) / (std::sqrt(2.0) * p.sigma)));
}

double swimmer_radius_b(const SwimmerParams& p, double lambda) {
  const double t = lambda / p.L;
  const double taper = std::pow(std::max(0.0, 1.0 - std::pow(t, 8)), 0.125);
  return p.A_b * (p.C1 + p.C2 * swimmer_step(p, lambda, p.lambda0)) * taper;
}

double swimmer_radius_n(const SwimmerParams& p, double lambda) {
  return 0.25 * swimmer_radius_b(p, lambda);
}

Point evaluate_swimmer_surface(const SwimmerParams& p, double lambda, double theta) {
  if (!(std::abs(lambda) <= p.L)) throw std::domain_error("swimmer parameter lambda outside [-L, L]");
  const SwimmerFrame f = swimmer_frame(p, lambda);
  const double twist = p.gamma * swimmer_step(p, lambda, p.lambda1);
  const Point n1 = std::cos(twist) * f.normal + std::sin(twist) * f.binormal;
  const Point n2 = std::cos(twist) * f.binormal - std::sin(twist) * f.normal;
  return swimmer_centreline(p, lambda) + swimmer_radius_n(p, lambda) * std::sin(theta) * n1 +
         swimmer_radius_b(p, lambda) * std::cos(theta) * n2;
}

}  // namespace fcfv
