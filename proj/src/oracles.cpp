#include "speclog/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace speclog {

double ball_integral_quadrature(const SpectralParams& params, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const int n = params.n();
  const double power = n + 2.0 * params.s() - 1.0;
  auto f = [power](double r) { return r > 0.0 ? std::pow(r, power) * 2.0 * std::log(r) : 0.0; };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double tol = 1e-14;
  double total = 0.0;
  if (radius <= 1.0) {
    total = integrator.integrate(f, 0.0, radius, tol);
  } else {
    total = integrator.integrate(f, 0.0, 1.0, tol) + integrator.integrate(f, 1.0, radius, tol);
  }
  return n * unit_ball_volume(n) * total;
}

}  // namespace speclog
