#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "speclog/bounds.hpp"

using namespace speclog;
using doctest::Approx;

TEST_CASE("lower bound frozen value at k = 3") {
  // |Omega| = pi in 1D with s = 1/2: prefactor 1 and no volume logarithm.
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::withVolume(1, std::numbers::pi);
  CHECK(sum_prefactor(p, geom) == Approx(1.0));
  CHECK(main_bound_threshold(p, geom) == Approx(1.0));
  const LowerBound b = lower_bound_sum(p, geom, 3);
  CHECK(b.regime == BoundRegime::main);
  CHECK(b.value == Approx(9.0 * (std::log(3.0) - 0.5)).epsilon(1e-13));
}

TEST_CASE("universal regime below the threshold") {
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::withVolume(1, 4.0 * std::numbers::pi);
  CHECK(main_bound_threshold(p, geom) == Approx(4.0));
  const LowerBound b = lower_bound_sum(p, geom, 1);
  CHECK(b.regime == BoundRegime::universal);
  CHECK(b.value == Approx(-2.0));
  CHECK(lower_bound_sum(p, geom, 4).regime == BoundRegime::main);
}

TEST_CASE("leading split sums to the main bound") {
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::withVolume(1, 2.0 * std::numbers::pi);
  const LeadingSplit split = leading_split(p, geom, 2);
  CHECK(split.leading == Approx(2.0 * std::log(2.0)));
  CHECK(split.correction == Approx(2.0 * (-std::log(2.0) - 0.5)));
  CHECK(split.leading + split.correction == Approx(-1.0));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const SpectralParams q(1 + static_cast<int>(rng() % 3), 0.05 + 0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
    const auto g = DomainGeometry::withVolume(q.n(), 0.5 + static_cast<double>(rng() % 50));
    const long long k = 1 + static_cast<long long>(rng() % 5000);
    const auto lb = lower_bound_sum(q, g, k);
    if (lb.regime != BoundRegime::main) continue;
    const auto s = leading_split(q, g, k);
    CHECK(s.leading + s.correction == Approx(lb.value).epsilon(1e-12));
  }
}

TEST_CASE("volume thresholds") {
  CHECK(small_volume_threshold(SpectralParams(1, 0.5)) == Approx(std::numbers::pi * std::exp(-0.5)));
  CHECK(small_volume_threshold(SpectralParams(2, 0.5)) == Approx(4.0 * std::numbers::pi * std::exp(-2.0 / 3.0)));
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::withVolume(1, 2.0 * std::numbers::pi);
  CHECK(positivity_threshold(p, geom) == Approx(2.0 * std::exp(0.5)));
}

TEST_CASE("lower bound is positive above the positivity threshold") {
  for (int n : {1, 2, 3}) {
    for (double s : {0.1, 0.5, 0.9}) {
      const SpectralParams p(n, s);
      for (double vol : {0.3, 5.0, 80.0}) {
        const auto geom = DomainGeometry::withVolume(n, vol);
        const double t = positivity_threshold(p, geom);
        for (long long k = static_cast<long long>(std::floor(t)) + 1; k < static_cast<long long>(t) + 200; ++k) {
          CHECK(lower_bound_sum(p, geom, k).value > 0.0);
        }
      }
    }
  }
}

TEST_CASE("weyl terms are consistent") {
  const SpectralParams p(2, 0.4);
  const auto geom = DomainGeometry::withVolume(2, 3.0);
  for (long long k : {10LL, 100LL, 1000LL}) {
    const double lead = sum_prefactor(p, geom) * std::pow(static_cast<double>(k), p.sumExponent()) *
                        std::log(static_cast<double>(k));
    CHECK(weyl_sum(p, geom, k) == Approx(lead));
    CHECK(weyl_eigenvalue(p, geom, k) ==
          Approx(p.homogeneity() / p.n() * lead / static_cast<double>(k)).epsilon(1e-12));
  }
  double partial = 0.0;
  for (long long j = 2; j <= 200000; ++j) partial += weyl_eigenvalue(p, geom, j);
  CHECK(std::abs(partial / weyl_sum(p, geom, 200000) - 1.0) * std::log(200000.0) <= 1.2);
}

TEST_CASE("upper bound constant is the floored residual maximum") {
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::box({std::numbers::pi});
  std::vector<double> spectrum;
  for (int j = 1; j <= 60; ++j) spectrum.push_back(weyl_eigenvalue(p, geom, std::max(j, 2)) - 0.5);
  const double raw = raw_upper_residual(spectrum, p, geom);
  const double c = estimate_upper_constant(spectrum, p, geom);
  CHECK(c == std::max(raw, 0.0));
  const double t = positivity_threshold(p, geom);
  double sum = 0.0;
  for (long long k = 1; k <= 60; ++k) {
    sum += spectrum[k - 1];
    if (k > t) CHECK(sum <= upper_bound_sum(p, geom, k, c) + 1e-9);
  }
}

TEST_CASE("bound report fields") {
  const SpectralParams p(1, 0.5);
  const auto geom = DomainGeometry::box({std::numbers::pi});
  const BoundReport first = make_bound_report(p, geom, 1);
  CHECK_FALSE(first.weylK.has_value());
  CHECK_FALSE(first.upperLeading.has_value());
  const BoundReport later = make_bound_report(p, geom, 10, 42.0);
  CHECK(later.weylK.has_value());
  CHECK(later.upperLeading.has_value());
  CHECK(*later.computedSum == 42.0);
  CHECK(later.lowerBound == lower_bound_sum(p, geom, 10).value);
  CHECK(std::string(to_string(BoundRegime::main)) != to_string(BoundRegime::universal));
}
