#include <cmath>
#include <numbers>
#include <stdexcept>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "speclog/coremath.hpp"
#include "speclog/geometry.hpp"
#include "speclog/oracles.hpp"
#include "speclog/quadrature.hpp"

using namespace speclog;
using doctest::Approx;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {2, 5, 12, 32}) {
    const GaussRule& rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(sum == Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("graded panels resolve a logarithmic endpoint") {
  std::vector<double> x, w;
  append_graded(1.0, 0.2, 30, gauss_legendre(16), x, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::log(x[i]);
  CHECK(sum == Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == Approx(2.0));
  CHECK(unit_ball_volume(2) == Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("radial symbol shape") {
  const SpectralParams p(1, 0.5);
  const RadialSymbol w(p);
  CHECK(w.value(0.0) == 0.0);
  CHECK(w.value(1.0) == 0.0);
  CHECK(w.minimizer() == Approx(std::exp(-1.0)));
  CHECK(w.minimum() == Approx(-2.0 / std::exp(1.0)));
  for (double r : {0.1, 0.5, 2.0, 7.0}) {
    const double h = 1e-6;
    CHECK(w.derivative(r) == Approx((w.value(r + h) - w.value(r - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("ball integral matches tanh-sinh quadrature") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const SpectralParams p(n, uniform(rng, 0.05, 0.95));
    const double r = uniform(rng, 0.05, 30.0);
    const double closed = ball_symbol_integral(p, r);
    const double oracle = ball_integral_quadrature(p, r);
    CHECK(std::abs(closed - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("psi_A frozen value and maximiser") {
  const SpectralParams p(1, 0.5);
  // A w(R) - (w(R)|B_R| - int_{B_R} w) at A = 8, R = 4 reduces to 16 (ln 16 - 1).
  CHECK(psi_A(p, 1.0, 8.0, 4.0) == Approx(16.0 * (std::log(16.0) - 1.0)).epsilon(1e-13));
  CHECK(optimal_radius(p, 1.0, 8.0) == Approx(4.0));
  const double best = psi_A(p, 1.0, 8.0, 4.0);
  for (double r = 1.0; r <= 40.0; r += 0.01) CHECK(psi_A(p, 1.0, 8.0, r) <= best + 1e-10);
}

TEST_CASE("main lower bound at A = 2e is e^2") {
  const SpectralParams p(1, 0.5);
  const auto b = mass_constrained_bounds(p, 1.0, 2.0 * std::exp(1.0));
  REQUIRE(b.main.has_value());
  CHECK(*b.main == Approx(std::exp(2.0)).epsilon(1e-13));
}

TEST_CASE("main bound absent below the ball mass") {
  const SpectralParams p(2, 0.3);
  CHECK_FALSE(mass_constrained_bounds(p, 1.0, 0.5 * std::numbers::pi).main.has_value());
  CHECK(mass_constrained_bounds(p, 1.0, 2.0 * std::numbers::pi).main.has_value());
}

TEST_CASE("bathtub minimum dominates both lower bounds") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 25; ++i) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const SpectralParams p(n, uniform(rng, 0.1, 0.9));
    const double m1 = uniform(rng, 0.2, 3.0);
    const double mass = uniform(rng, 0.1, 30.0);
    const auto grid = default_bathtub_grid(p, m1, mass, 20000);
    const auto oracle = bathtub_minimum_oracle(p, m1, mass, grid);
    const auto b = mass_constrained_bounds(p, m1, mass);
    CHECK(oracle.value >= b.universal - oracle.cellError - 1e-3);
    if (b.main) {
      CHECK(oracle.value >= *b.main - oracle.cellError - 1e-3);
      // the main bound is attained by the ball of radius R_A
      CHECK(oracle.value == Approx(*b.main).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("karamata ratios at the tabulated ranks") {
  CHECK(karamata_sum_ratio(2.0, 1.0, 1000) == Approx(0.928617825037923).epsilon(1e-12));
  CHECK(karamata_sum_ratio(2.0, 1.0, 10000) == Approx(0.9458131919689234).epsilon(1e-12));
  CHECK(karamata_sum_ratio(2.0, 1.0, 100000) == Approx(0.9565805518306627).epsilon(1e-12));
  CHECK(karamata_sum_ratio(2.0, 1.0, 1000000) == Approx(0.9638097931749318).epsilon(1e-12));
  double prev = 0.0;
  for (long long k : {100LL, 1000LL, 10000LL, 100000LL}) {
    const double r = karamata_sum_ratio(2.0, 1.0, k);
    CHECK(r > prev);
    CHECK(std::abs(r - 1.0) * std::log(static_cast<double>(k)) <= 1.2);
    prev = r;
  }
}

TEST_CASE("cutoff ramp is C2 and clamped") {
  CHECK(CutoffProfile::ramp(-1.0) == 0.0);
  CHECK(CutoffProfile::ramp(2.0) == 1.0);
  CHECK(CutoffProfile::ramp(0.5) == Approx(0.5));
  for (double t : {0.0, 1.0}) {
    CHECK(CutoffProfile::rampDerivative(t) == Approx(0.0));
    CHECK(CutoffProfile::rampSecondDerivative(t) == Approx(0.0));
  }
  const auto box = DomainGeometry::box({1.0});
  const double x = 0.05;
  CHECK(cutoff_value({0.1}, box, std::span<const double>(&x, 1)) == Approx(0.5));
  const double outside = 1.5;
  CHECK(cutoff_value({0.1}, box, std::span<const double>(&outside, 1)) == 0.0);
}

TEST_CASE("cutoff mass approaches the volume as sigma shrinks") {
  const auto box = DomainGeometry::box({2.0, 3.0});
  double prev = 0.0;
  for (double sigma : {0.4, 0.2, 0.1, 0.05}) {
    const double m = cutoff_mass({sigma}, box);
    CHECK(m < 6.0);
    CHECK(m > prev);
    prev = m;
  }
  CHECK(prev == Approx(6.0).epsilon(0.05));
  // 1D closed form: L - 2 sigma (1 - int_0^1 ramp^2)
  double rampSq = 0.0;
  const GaussRule& g = gauss_legendre(16);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = 0.5 * (g.nodes[i] + 1.0);
    rampSq += 0.5 * g.weights[i] * std::pow(CutoffProfile::ramp(t), 2);
  }
  CHECK(cutoff_mass({0.1}, DomainGeometry::box({1.0})) == Approx(1.0 - 0.2 * (1.0 - rampSq)).epsilon(1e-13));
}

TEST_CASE("box layer volume and constants") {
  const auto box = DomainGeometry::box({2.0, 4.0});
  CHECK(box.volume == Approx(8.0));
  CHECK(*box.layerMaxWidth == Approx(1.0));
  CHECK(box_layer_volume(box, 0.5) == Approx(8.0 - 1.0 * 3.0));
  for (double t : {0.1, 0.3, 0.7, 1.0}) CHECK(box_layer_volume(box, t) <= *box.layerConstant * t + 1e-12);
}

TEST_CASE("geometry validation rejects bad input") {
  CHECK_THROWS_AS(DomainGeometry::box({}), std::invalid_argument);
  CHECK_THROWS_AS(DomainGeometry::box({-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DomainGeometry::withVolume(1, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(0, 0.5), std::invalid_argument);
}
