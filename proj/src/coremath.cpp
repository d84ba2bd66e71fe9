#include "speclog/coremath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "speclog/quadrature.hpp"

namespace speclog {

SpectralParams::SpectralParams(int n, double s) : n_(n), s_(s) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1, got " + std::to_string(n));
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("order s must lie in (0, 1), got " + std::to_string(s));
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit ball volume needs n >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double RadialSymbol::value(double r) const {
  if (r < 0.0) throw std::invalid_argument("radial symbol needs r >= 0");
  if (r == 0.0) return 0.0;
  return std::pow(r, 2.0 * s_) * 2.0 * std::log(r);
}

double RadialSymbol::derivative(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("radial symbol derivative needs r > 0");
  return 2.0 * std::pow(r, 2.0 * s_ - 1.0) * (2.0 * s_ * std::log(r) + 1.0);
}

double RadialSymbol::minimizer() const { return std::exp(-1.0 / (2.0 * s_)); }

double symbol_radial(const SpectralParams& params, double r) { return RadialSymbol(params).value(r); }

double ball_symbol_integral(const SpectralParams& params, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const int n = params.n();
  const double p = params.homogeneity();
  return n * unit_ball_volume(n) * std::pow(radius, p) * (2.0 * std::log(radius) / p - 2.0 / (p * p));
}

double psi_A(const SpectralParams& params, double m1, double mass, double radius) {
  if (!(m1 > 0.0) || !(mass > 0.0)) throw std::invalid_argument("psi_A needs M1 > 0 and A > 0");
  if (!(radius >= 1.0)) throw std::invalid_argument("psi_A is only defined for R >= 1");
  const double w = symbol_radial(params, radius);
  const double ballVolume = unit_ball_volume(params.n()) * std::pow(radius, params.n());
  return mass * w - m1 * (w * ballVolume - ball_symbol_integral(params, radius));
}

double optimal_radius(const SpectralParams& params, double m1, double mass) {
  return std::pow(mass / (m1 * unit_ball_volume(params.n())), 1.0 / params.n());
}

MassConstrainedBounds mass_constrained_bounds(const SpectralParams& params, double m1, double mass) {
  if (!(m1 > 0.0) || !(mass >= 0.0)) throw std::invalid_argument("mass-constrained bounds need M1 > 0 and A >= 0");
  const int n = params.n();
  const double p = params.homogeneity();
  const double omega = unit_ball_volume(n);
  MassConstrainedBounds out{-2.0 * n * omega / (p * p) * m1, std::nullopt};
  const double threshold = m1 * omega;
  if (mass >= threshold) {
    out.main = 2.0 / p * std::pow(threshold, -params.sizeExponent()) * std::pow(mass, params.sumExponent()) *
               (std::log(mass / threshold) - n / p);
  }
  return out;
}

RadialGrid default_bathtub_grid(const SpectralParams& params, double m1, double mass, std::size_t cells) {
  return {std::max(2.0 * optimal_radius(params, m1, mass), 1.0), cells};
}

BathtubResult bathtub_minimum_oracle(const SpectralParams& params, double m1, double mass, const RadialGrid& grid) {
  if (!(m1 > 0.0) || !(mass > 0.0)) throw std::invalid_argument("bathtub oracle needs M1 > 0 and A > 0");
  if (grid.cells == 0 || !(grid.radius > 0.0)) throw std::invalid_argument("bathtub grid is empty");
  const int n = params.n();
  const double omega = unit_ball_volume(n);
  const RadialSymbol w(params);
  const double h = grid.radius / static_cast<double>(grid.cells);

  std::vector<double> shell(grid.cells);
  std::vector<double> level(grid.cells);
  double capacity = 0.0;
  double maxShell = 0.0;
  double maxAbsW = 0.0;
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double r0 = h * static_cast<double>(i);
    const double r1 = h * static_cast<double>(i + 1);
    shell[i] = omega * (std::pow(r1, n) - std::pow(r0, n));
    level[i] = w.value(0.5 * (r0 + r1));
    capacity += m1 * shell[i];
    maxShell = std::max(maxShell, shell[i]);
    maxAbsW = std::max({maxAbsW, std::abs(w.value(r0)), std::abs(w.value(r1))});
  }
  if (capacity < mass * (1.0 - 1e-14)) {
    throw std::invalid_argument("bathtub grid capacity " + std::to_string(capacity) + " is below the mass " +
                                std::to_string(mass));
  }

  std::vector<std::size_t> order(grid.cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });

  double remaining = mass;
  double m2 = 0.0;
  for (std::size_t idx : order) {
    if (remaining <= 0.0) break;
    const double take = std::min(m1 * shell[idx], remaining);
    m2 += take * level[idx];
    remaining -= take;
  }
  return {m2, m1 * maxShell * maxAbsW};
}

double karamata_sum_ratio(double rho, double c, long long k) {
  if (!(rho > 0.0) || !(c > 0.0)) throw std::invalid_argument("karamata ratio needs rho > 0 and c > 0");
  if (k < 3) throw std::invalid_argument("karamata ratio needs k >= 3");
  const double coef = c / std::tgamma(rho);
  // Neumaier-compensated sum; the terms grow monotonically.
  double sum = 0.0;
  double comp = 0.0;
  for (long long j = 2; j <= k; ++j) {
    const double jd = static_cast<double>(j);
    const double term = coef * std::pow(jd, rho - 1.0) * std::log(jd);
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double kd = static_cast<double>(k);
  return (sum + comp) / (c / std::tgamma(1.0 + rho) * std::pow(kd, rho) * std::log(kd));
}

double CutoffProfile::ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double CutoffProfile::rampDerivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

double CutoffProfile::rampSecondDerivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

double cutoff_value(const CutoffProfile& profile, const DomainGeometry& box, std::span<const double> x) {
  if (!(profile.sigma > 0.0)) throw std::invalid_argument("cutoff layer width sigma must be positive");
  const double d = box_signed_distance(box, x);
  if (d <= 0.0) return 0.0;
  return CutoffProfile::ramp(d / profile.sigma);
}

double cutoff_mass(const CutoffProfile& profile, const DomainGeometry& box) {
  if (!(profile.sigma > 0.0)) throw std::invalid_argument("cutoff layer width sigma must be positive");
  if (!box.boxLengths) throw std::invalid_argument("cutoff mass is only available for boxes");
  const auto& lengths = *box.boxLengths;
  const GaussRule& rule = gauss_legendre(8);
  constexpr int kLayerPanels = 32;

  // Per-axis nodes with breaks at sigma and L - sigma; the layer pieces are
  // subdivided so the diagonal kinks of min_i dist_i in box corners are resolved.
  std::vector<std::vector<double>> nodes(lengths.size());
  std::vector<std::vector<double>> weights(lengths.size());
  for (std::size_t axis = 0; axis < lengths.size(); ++axis) {
    const double L = lengths[axis];
    const double layer = std::min(profile.sigma, 0.5 * L);
    for (int p = 0; p < kLayerPanels; ++p) {
      append_panel(layer * p / kLayerPanels, layer * (p + 1) / kLayerPanels, rule, nodes[axis], weights[axis]);
    }
    if (L - layer > layer) append_panel(layer, L - layer, rule, nodes[axis], weights[axis]);
    for (int p = 0; p < kLayerPanels; ++p) {
      append_panel(L - layer * (p + 1) / kLayerPanels, L - layer * p / kLayerPanels, rule, nodes[axis],
                   weights[axis]);
    }
  }

  const std::size_t dim = lengths.size();
  std::vector<std::size_t> index(dim, 0);
  std::vector<double> point(dim);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      point[a] = nodes[a][index[a]];
      weight *= weights[a][index[a]];
    }
    const double v = cutoff_value(profile, box, point);
    total += weight * v * v;
    std::size_t a = 0;
    while (a < dim && ++index[a] == nodes[a].size()) index[a++] = 0;
    if (a == dim) break;
  }
  return total;
}

}  // namespace speclog
