#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "speclog/solver.hpp"

namespace speclog {

GalerkinBasis GalerkinBasis::make(const DomainGeometry& box, int maxIndexPerAxis) {
  box.validate();
  if (!box.isBox()) throw std::invalid_argument("Galerkin basis needs a box domain");
  if (box.n > kMaxSolverDim) throw std::invalid_argument("Galerkin solver supports n <= 2 only");
  if (maxIndexPerAxis < 1) throw std::invalid_argument("basis needs at least one index per axis");
  GalerkinBasis basis;
  basis.box = box;
  basis.maxIndexPerAxis = maxIndexPerAxis;
  if (box.n == 1) {
    for (int j = 1; j <= maxIndexPerAxis; ++j) basis.indexSet.push_back({j, 0});
  } else {
    for (int j1 = 1; j1 <= maxIndexPerAxis; ++j1) {
      for (int j2 = 1; j2 <= maxIndexPerAxis; ++j2) basis.indexSet.push_back({j1, j2});
    }
  }
  return basis;
}

GalerkinBasis GalerkinBasis::withSize(const DomainGeometry& box, std::size_t size) {
  if (size == 0) throw std::invalid_argument("basis size must be positive");
  if (box.n == 1) return make(box, static_cast<int>(size));
  const auto m = static_cast<int>(std::llround(std::sqrt(static_cast<double>(size))));
  if (static_cast<std::size_t>(m) * static_cast<std::size_t>(m) != size) {
    throw std::invalid_argument("2D basis size must be a perfect square, got " + std::to_string(size));
  }
  return make(box, m);
}

double GalerkinBasis::maxResonance() const {
  double best = 0.0;
  for (double L : *box.boxLengths) best = std::max(best, maxIndexPerAxis * std::numbers::pi / L);
  return best;
}

std::string GalerkinBasis::describe() const {
  std::string lengths;
  for (double L : *box.boxLengths) lengths += fmt::format("{}{:.17g}", lengths.empty() ? "" : ",", L);
  return fmt::format("sine-tensor n={} L=[{}] maxIndex={} size={}", box.n, lengths, maxIndexPerAxis, size());
}

double Symbol::value(double r) const {
  if (kind == SymbolKind::fractional) return std::pow(r, 2.0 * order);
  if (r == 0.0) return 0.0;
  return std::pow(r, 2.0 * order) * 2.0 * std::log(r);
}

double Symbol::derivative(double r) const {
  if (kind == SymbolKind::fractional) return order == 0.0 ? 0.0 : 2.0 * order * std::pow(r, 2.0 * order - 1.0);
  return 2.0 * std::pow(r, 2.0 * order - 1.0) * (2.0 * order * std::log(r) + 1.0);
}

std::string Symbol::tag() const {
  return kind == SymbolKind::fractionalLog ? fmt::format("fractional-log(s={:.17g})", order)
                                           : fmt::format("fractional(s'={:.17g})", order);
}

std::string QuadratureConfig::describe() const {
  return fmt::format("cutoff={:.17g} nodes={} panelsPerSpacing={} grading={} tailOrder={} guard={:.17g}",
                     cutoffRadius, nodesPerPanel, panelsPerSpacing, gradingLevels, tailOrder, singularityGuard);
}

QuadratureConfig default_quadrature(const GalerkinBasis& basis) {
  QuadratureConfig quad;
  double spacing = 0.0;
  for (double L : *basis.box.boxLengths) spacing = std::max(spacing, std::numbers::pi / L);
  // In 2D the strip tails integrate the edge terms against a whole axis, so the bulk reaches further out.
  // Small bases get a floor: the tail error relative to the diagonal only shrinks with the absolute cutoff.
  quad.cutoffRadius = std::max(2.5 * basis.maxResonance() + (basis.dim() == 1 ? 1.0 : 12.0) * spacing, 64.0 * spacing);
  return quad;
}

void validate_quadrature(const GalerkinBasis& basis, const QuadratureConfig& quad) {
  if (!(quad.cutoffRadius > basis.maxResonance())) {
    throw std::invalid_argument(fmt::format(
        "quadrature invariant 'cutoffRadius exceeds the largest basis resonance' failed: {} <= {}",
        quad.cutoffRadius, basis.maxResonance()));
  }
  if (quad.nodesPerPanel < 2 || quad.nodesPerPanel > 64) {
    throw std::invalid_argument("quadrature invariant 'nodesPerPanel in [2, 64]' failed");
  }
  if (quad.panelsPerSpacing < 1) throw std::invalid_argument("quadrature invariant 'panelsPerSpacing >= 1' failed");
  if (quad.gradingLevels < 0 || quad.gradingLevels > 60) {
    throw std::invalid_argument("quadrature invariant 'gradingLevels in [0, 60]' failed");
  }
  if (quad.tailOrder < 0 || quad.tailOrder > 3) {
    throw std::invalid_argument("quadrature invariant 'tailOrder in [0, 3]' failed");
  }
  if (basis.dim() == 2 && quad.tailOrder < 1) {
    throw std::invalid_argument("quadrature invariant 'tailOrder >= 1 for n = 2' failed");
  }
  if (!(quad.singularityGuard > 0.0 && quad.singularityGuard < 0.5)) {
    throw std::invalid_argument("quadrature invariant 'singularityGuard in (0, 0.5)' failed");
  }
}

std::complex<double> basis_transform_1d(double length, int j, double xi, double singularityGuard) {
  if (!(length > 0.0)) throw std::invalid_argument("basis transform needs L > 0");
  if (j < 1) throw std::invalid_argument("basis transform needs j >= 1");
  using namespace std::complex_literals;
  const double a = j * std::numbers::pi / length;
  const double scale = std::sqrt(2.0 / length) * a / std::sqrt(2.0 * std::numbers::pi);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^j

  if (std::abs(xi * xi - a * a) >= singularityGuard * a * a) {
    return scale * (1.0 - sign * std::exp(-1i * (length * xi))) / (a * a - xi * xi);
  }

  // Near xi = b = +-a: (-1)^j e^{-iLb} = 1, so the numerator is 1 - e^{-iL delta}
  // and a^2 - xi^2 = -delta (xi + b).
  const double b = xi >= 0.0 ? a : -a;
  const double delta = xi - b;
  const double phase = length * delta;
  std::complex<double> ratio;  // (1 - e^{-i L delta}) / delta
  if (std::abs(phase) < 0.5) {
    // i L sum_k z^k / (k+1)!, z = -i L delta
    const std::complex<double> z = -1i * phase;
    std::complex<double> term = 1.0;
    std::complex<double> sum = 1.0;
    for (int k = 1; k < 40; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    ratio = 1i * length * sum;
  } else {
    const double half = std::sin(0.5 * phase);
    ratio = std::complex<double>(2.0 * half * half, std::sin(phase)) / delta;
  }
  return -scale * ratio / (xi + b);
}

}  // namespace speclog
