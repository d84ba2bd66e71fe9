#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "speclog/matrix_cache.hpp"
#include "speclog/quadrature.hpp"
#include "speclog/solver.hpp"

using namespace speclog;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const DomainGeometry kUnitPiBox = DomainGeometry::box({std::numbers::pi});

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("speclog-solver-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Direct transform (2 pi)^{-1/2} int_0^L e_j(x) e^{-i x xi} dx by Gauss quadrature.
std::complex<double> transform_by_quadrature(double length, int j, double xi) {
  const GaussRule& g = gauss_legendre(48);
  std::complex<double> sum = 0.0;
  const int panels = 8 + j;
  for (int p = 0; p < panels; ++p) {
    const double a = length * p / panels, b = length * (p + 1) / panels;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i];
      const double e = std::sqrt(2.0 / length) * std::sin(j * std::numbers::pi * x / length);
      sum += 0.5 * (b - a) * g.weights[i] * e * std::exp(std::complex<double>(0.0, -x * xi));
    }
  }
  return sum / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("basis transform matches direct quadrature, including near resonance") {
  CHECK(std::abs(basis_transform_1d(std::numbers::pi, 1, 0.0) - std::complex<double>(2.0 / std::numbers::pi, 0.0)) <
        1e-15);
  for (double length : {1.0, std::numbers::pi, 4.5}) {
    for (int j : {1, 2, 7}) {
      const double a = j * std::numbers::pi / length;
      for (double xi : {-3.0 * a, -a, -a + 1e-5, 0.0, 0.3 * a, a - 1e-4, a, a + 2e-3, 5.0 * a}) {
        const auto closed = basis_transform_1d(length, j, xi);
        const auto direct = transform_by_quadrature(length, j, xi);
        CHECK(std::abs(closed - direct) < 1e-12);
      }
    }
  }
}

TEST_CASE("basis construction") {
  const auto b1 = GalerkinBasis::withSize(kUnitPiBox, 5);
  CHECK(b1.size() == 5);
  CHECK(b1.maxResonance() == Approx(5.0));
  const auto b2 = GalerkinBasis::withSize(DomainGeometry::box({1.0, 2.0}), 9);
  CHECK(b2.size() == 9);
  CHECK(b2.indexSet[1] == MultiIndex{1, 2});
  CHECK_THROWS_AS(GalerkinBasis::withSize(DomainGeometry::box({1.0, 2.0}), 10), std::invalid_argument);
  CHECK_THROWS_AS(GalerkinBasis::withSize(DomainGeometry::withVolume(1, 2.0), 4), std::invalid_argument);
}

TEST_CASE("quadrature validation names the invariant") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 10);
  QuadratureConfig q = default_quadrature(basis);
  CHECK_NOTHROW(validate_quadrature(basis, q));
  q.cutoffRadius = 5.0;
  CHECK_THROWS_WITH_AS(validate_quadrature(basis, q), doctest::Contains("cutoff"), std::invalid_argument);
  q = default_quadrature(basis);
  q.nodesPerPanel = 1;
  CHECK_THROWS_AS(validate_quadrature(basis, q), std::invalid_argument);
  q = default_quadrature(basis);
  q.tailOrder = 4;
  CHECK_THROWS_AS(validate_quadrature(basis, q), std::invalid_argument);
  const auto basis2 = GalerkinBasis::withSize(DomainGeometry::box({1.0, 1.0}), 4);
  QuadratureConfig q2 = default_quadrature(basis2);
  q2.tailOrder = 0;
  CHECK_THROWS_AS(validate_quadrature(basis2, q2), std::invalid_argument);
}

TEST_CASE("order-one fractional symbol reproduces the Dirichlet Laplacian") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 50);
  const FormMatrix m = assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                            Symbol::fractional(1.0));
  CHECK(m.imaginaryResidual < kImaginaryTolerance);
  // |xi|^2 is diagonal in the sine basis with entries j^2 on (0, pi).
  for (int j = 0; j < 20; ++j) {
    for (int k = 0; k < 20; ++k) {
      CHECK(std::abs(m.entries(j, k) - (j == k ? (j + 1.0) * (j + 1.0) : 0.0)) < 1e-6 * (j + 1.0) * (k + 1.0));
    }
  }
  const Spectrum sp = solve_spectrum(m, kUnitPiBox);
  for (int j = 1; j <= 10; ++j) CHECK(sp.eigenvalues[j - 1] == Approx(j * j).epsilon(1e-6));
}

TEST_CASE("order-zero fractional symbol gives the identity") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 12);
  const FormMatrix m = assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                            Symbol::fractional(0.0));
  CHECK((m.entries - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two-dimensional Laplacian on a square") {
  const DomainGeometry square = DomainGeometry::box({std::numbers::pi, std::numbers::pi});
  const auto basis = GalerkinBasis::withSize(square, 16);
  const FormMatrix m =
      assemble_form_matrix(basis, SpectralParams(2, 0.5), default_quadrature(basis), Symbol::fractional(1.0));
  const Spectrum sp = solve_spectrum(m, square);
  const std::vector<double> expected{2, 5, 5, 8, 10, 10};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(sp.eigenvalues[i] == Approx(expected[i]).epsilon(1e-6));
}

TEST_CASE("log-symbol form matrix is symmetric with real entries") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 30);
  const FormMatrix m = assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                            Symbol::fractionalLog(0.5));
  CHECK(m.entries == m.entries.transpose());
  CHECK(m.imaginaryResidual < kImaginaryTolerance);
  // opposite-parity couplings vanish by reflection symmetry of the interval
  for (int j = 0; j < 30; ++j)
    for (int k = j + 1; k < 30; k += 2) CHECK(std::abs(m.entries(j, k)) < 1e-10);
  CHECK(m.errorEstimate.maxCoeff() <= kTailTolerance * m.entries.diagonal().cwiseAbs().maxCoeff());
}

TEST_CASE("assembly is bitwise deterministic across thread counts") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 40);
  const auto quad = default_quadrature(basis);
  const SpectralParams p(1, 0.5);
  const FormMatrix a = assemble_form_matrix(basis, p, quad, Symbol::fractionalLog(0.5), 1);
  for (unsigned t : {2u, 3u, 7u}) {
    const FormMatrix b = assemble_form_matrix(basis, p, quad, Symbol::fractionalLog(0.5), t);
    CHECK(std::memcmp(a.entries.data(), b.entries.data(), sizeof(double) * a.entries.size()) == 0);
  }
}

TEST_CASE("s-derivative of the fractional form is the log form") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 12);
  const auto quad = default_quadrature(basis);
  const SpectralParams p(1, 0.5);
  const double coarse = derivative_oracle_check(basis, p, quad, 1e-2);
  const double fine = derivative_oracle_check(basis, p, quad, 1e-3);
  CHECK(fine <= 1e-4);
  const double order = std::log10(coarse / fine);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
  CHECK_THROWS_AS(derivative_oracle_check(basis, p, quad, 0.3), std::invalid_argument);
}

TEST_CASE("symbol order must match the spectral parameter") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 4);
  CHECK_THROWS_AS(assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                       Symbol::fractionalLog(0.3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                       Symbol::fractional(1.5)),
                  std::invalid_argument);
}

TEST_CASE("under-resolved tails are rejected") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 10);
  QuadratureConfig q = default_quadrature(basis);
  q.tailOrder = 0;
  CHECK_THROWS_WITH_AS(assemble_form_matrix(basis, SpectralParams(1, 0.5), q, Symbol::fractionalLog(0.5)),
                       doctest::Contains("tail estimate"), std::invalid_argument);
}

TEST_CASE("digest separates configurations") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 10);
  const auto quad = default_quadrature(basis);
  const SpectralParams p(1, 0.5);
  const auto d = form_digest(basis, p, quad, Symbol::fractionalLog(0.5));
  CHECK(d == form_digest(basis, p, quad, Symbol::fractionalLog(0.5)));
  QuadratureConfig q2 = quad;
  q2.nodesPerPanel += 1;
  CHECK(d != form_digest(basis, p, q2, Symbol::fractionalLog(0.5)));
  CHECK(d != form_digest(GalerkinBasis::withSize(kUnitPiBox, 11), p, quad, Symbol::fractionalLog(0.5)));
  CHECK(d != form_digest(basis, p, quad, Symbol::fractional(0.5)));
}

TEST_CASE("matrix cache round trip and corruption handling") {
  const fs::path dir = scratch_dir("cache");
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 16);
  const auto quad = default_quadrature(basis);
  const SpectralParams p(1, 0.5);
  const Symbol sym = Symbol::fractionalLog(0.5);
  const FormMatrix m = assemble_form_matrix(basis, p, quad, sym);
  const fs::path file = dir / "m.slfm";
  write_matrix_cache(file, m);

  const auto loaded = read_matrix_cache(file, basis, p, quad, sym);
  REQUIRE(loaded.has_value());
  CHECK(loaded->entries == m.entries);
  CHECK(loaded->provenance.digest == m.provenance.digest);

  QuadratureConfig other = quad;
  other.gradingLevels += 1;
  CHECK_FALSE(read_matrix_cache(file, basis, p, other, sym).has_value());
  CHECK_FALSE(read_matrix_cache(dir / "missing.slfm", basis, p, quad, sym).has_value());

  const auto size = fs::file_size(file);
  fs::resize_file(file, size - 8);
  CHECK_FALSE(read_matrix_cache(file, basis, p, quad, sym).has_value());

  write_matrix_cache(file, m);
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_FALSE(read_matrix_cache(file, basis, p, quad, sym).has_value());
  fs::remove_all(dir);
}

TEST_CASE("spectrum requires a symmetric finite matrix") {
  const auto basis = GalerkinBasis::withSize(kUnitPiBox, 4);
  FormMatrix m = assemble_form_matrix(basis, SpectralParams(1, 0.5), default_quadrature(basis),
                                      Symbol::fractionalLog(0.5));
  m.entries(0, 1) += 1e-3;
  CHECK_THROWS_AS(solve_spectrum(m, kUnitPiBox), std::invalid_argument);
}
