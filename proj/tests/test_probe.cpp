#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "speclog/planewave.hpp"
#include "speclog/quadrature.hpp"

using namespace speclog;
using doctest::Approx;

namespace {

// int_{eta-r}^{eta+r} |t|^{2s} ln t^2 dt by Gauss panels, graded toward the kink at 0.
double window_integral(const SpectralParams& p, double eta, double r) {
  const RadialSymbol w(p);
  auto half = [&](double hi) {
    // int_0^hi w(|t|) dt
    std::vector<double> x, wt;
    append_graded(hi, 0.2, 30, gauss_legendre(16), x, wt);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += wt[i] * w.value(x[i]);
    return sum;
  };
  auto signed_half = [&](double t) { return t >= 0.0 ? half(t) : -half(-t); };
  return signed_half(eta + r) - signed_half(eta - r);
}

}  // namespace

TEST_CASE("main coefficient agrees with the ball integral") {
  for (int n : {1, 2, 3}) {
    for (double s : {0.2, 0.5, 0.8}) {
      const SpectralParams p(n, s);
      for (double r : {1.5, 10.0, 40.0}) {
        CHECK(planewave_main_coefficient(p, r) == Approx(ball_symbol_integral(p, r)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("probe energy matches brute-force nested quadrature") {
  const SpectralParams p(1, 0.5);
  const auto box = DomainGeometry::box({std::numbers::pi});
  const CutoffProfile profile{0.25};
  const double r = 3.0;
  // Bin sums alias the kernel with period paddedLength; 128 keeps that below 1e-7 relative.
  ProbeConfig config;
  config.samples = std::size_t{1} << 17;
  config.paddedLength = 128.0;
  config.frequencyCutoff = 600.0;
  const PlaneWaveEnergy e = cutoff_planewave_energy(profile, box, p, r, config);

  double brute = 0.0;
  const GaussRule& g = gauss_legendre(8);
  const double reach = 400.0;
  const int panels = 1600;
  for (int k = 0; k < panels; ++k) {
    const double a = -reach + 2.0 * reach * k / panels, b = a + 2.0 * reach / panels;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double eta = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i];
      brute += 0.5 * (b - a) * g.weights[i] * cutoff_transform_sq(profile, box, eta) * window_integral(p, eta, r);
    }
  }
  CHECK(e.lhs == Approx(brute).epsilon(1e-6));
  CHECK(e.cutoffMass == Approx(cutoff_mass(profile, box)).epsilon(1e-10));
  CHECK(e.mainTerm == Approx(planewave_main_coefficient(p, r) * e.cutoffMass).epsilon(1e-12));
  CHECK(e.remainder == Approx(e.lhs - e.mainTerm).epsilon(1e-12));
}

TEST_CASE("probe rejects unresolved or unsupported setups") {
  const SpectralParams p(1, 0.5);
  const auto box = DomainGeometry::box({std::numbers::pi});
  ProbeConfig small;
  small.samples = 1 << 10;
  CHECK_THROWS_AS(cutoff_planewave_energy({0.1}, box, p, 20.0, small), std::invalid_argument);
  CHECK_THROWS_AS(cutoff_planewave_energy({2.0}, box, p, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(cutoff_planewave_energy({0.1}, box, p, 1.0), std::invalid_argument);
  ProbeConfig narrow;
  narrow.paddedLength = 4.0;
  CHECK_THROWS_AS(cutoff_planewave_energy({0.1}, box, p, 20.0, narrow), std::invalid_argument);
  CHECK_THROWS_AS(cutoff_planewave_energy({0.1}, DomainGeometry::box({1.0, 1.0}), SpectralParams(2, 0.5), 20.0),
                  std::invalid_argument);
}

TEST_CASE("scaling fit recovers synthetic exponents") {
  std::vector<double> radii, sigmas, values;
  for (double s : {0.02, 0.05, 0.1}) {
    for (double r : {20.0, 30.0, 40.0}) {
      radii.push_back(r);
      sigmas.push_back(s);
      values.push_back(-3.0 * std::pow(r, 1.7) * std::pow(s, 0.9));
    }
  }
  const ScalingFit fit = fit_remainder_scaling(radii, sigmas, values);
  CHECK(fit.rExponent == Approx(1.7).epsilon(1e-12));
  CHECK(fit.sigmaExponent == Approx(0.9).epsilon(1e-12));
  CHECK(fit.intercept == Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.residualNorm < 1e-10);
  const std::vector<double> x{1.0, 2.0, 4.0}, y{3.0, 12.0, 48.0};
  CHECK(loglog_slope(x, y) == Approx(2.0));
}
