#include "speclog/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace speclog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double omega_volume(const SpectralParams& params, const DomainGeometry& geom) {
  geom.validate();
  if (geom.n != params.n()) throw std::invalid_argument("domain dimension does not match the spectral parameters");
  return unit_ball_volume(params.n()) * geom.volume;
}

void require_log_rank(long long k, const char* what) {
  if (k < 2) throw std::invalid_argument(std::string(what) + " needs k >= 2 (ln k > 0), got k = " + std::to_string(k));
}

}  // namespace

const char* to_string(BoundRegime regime) { return regime == BoundRegime::main ? "main" : "universal"; }

double sum_prefactor(const SpectralParams& params, const DomainGeometry& geom) {
  const double ov = omega_volume(params, geom);
  return 2.0 / params.homogeneity() * std::pow(kTwoPi, 2.0 * params.s()) * std::pow(ov, -params.sizeExponent());
}

double main_bound_threshold(const SpectralParams& params, const DomainGeometry& geom) {
  return omega_volume(params, geom) / std::pow(kTwoPi, params.n());
}

LowerBound lower_bound_sum(const SpectralParams& params, const DomainGeometry& geom, long long k) {
  if (k < 1) throw std::invalid_argument("lower_bound_sum needs k >= 1");
  const int n = params.n();
  const double p = params.homogeneity();
  const double kd = static_cast<double>(k);
  const double threshold = main_bound_threshold(params, geom);
  if (kd >= threshold) {
    const double value = sum_prefactor(params, geom) * std::pow(kd, params.sumExponent()) *
                         (std::log(kd / threshold) - n / p);
    return {value, BoundRegime::main};
  }
  const double universal = -std::pow(kTwoPi, -n) * 2.0 * n * unit_ball_volume(n) / (p * p) * geom.volume;
  return {universal, BoundRegime::universal};
}

LeadingSplit leading_split(const SpectralParams& params, const DomainGeometry& geom, long long k) {
  require_log_rank(k, "leading_split");
  const double kd = static_cast<double>(k);
  const double scale = sum_prefactor(params, geom) * std::pow(kd, params.sumExponent());
  const double shift = std::log(1.0 / main_bound_threshold(params, geom)) - params.n() / params.homogeneity();
  return {scale * std::log(kd), scale * shift};
}

double positivity_threshold(const SpectralParams& params, const DomainGeometry& geom) {
  return main_bound_threshold(params, geom) * std::exp(params.n() / params.homogeneity());
}

double small_volume_threshold(const SpectralParams& params) {
  const int n = params.n();
  return std::pow(kTwoPi, n) / unit_ball_volume(n) * std::exp(-n / params.homogeneity());
}

double weyl_eigenvalue(const SpectralParams& params, const DomainGeometry& geom, long long k) {
  require_log_rank(k, "weyl_eigenvalue");
  const double kd = static_cast<double>(k);
  const double fractional =
      std::pow(kTwoPi, 2.0 * params.s()) * std::pow(omega_volume(params, geom), -params.sizeExponent()) *
      std::pow(kd, params.sizeExponent());
  const double logarithmic = 2.0 / params.n() * std::log(kd);
  return fractional * logarithmic;
}

double weyl_sum(const SpectralParams& params, const DomainGeometry& geom, long long k) {
  require_log_rank(k, "weyl_sum");
  const double kd = static_cast<double>(k);
  return sum_prefactor(params, geom) * std::pow(kd, params.sumExponent()) * std::log(kd);
}

double upper_bound_sum(const SpectralParams& params, const DomainGeometry& geom, long long k, double constant) {
  if (!geom.hasLayerEstimate()) {
    throw std::invalid_argument("upper_bound_sum needs the boundary-layer constants C_Omega and t0");
  }
  if (!(constant >= 0.0)) throw std::invalid_argument("upper bound constant must be nonnegative");
  const double threshold = positivity_threshold(params, geom);
  if (!(static_cast<double>(k) > threshold)) {
    throw std::invalid_argument("upper_bound_sum needs k > " + std::to_string(threshold) + ", got k = " +
                                std::to_string(k));
  }
  return weyl_sum(params, geom, k) + constant * std::pow(static_cast<double>(k), params.sumExponent());
}

double raw_upper_residual(std::span<const double> spectrum, const SpectralParams& params,
                          const DomainGeometry& geom) {
  if (spectrum.empty()) throw std::invalid_argument("spectrum is empty");
  if (!std::is_sorted(spectrum.begin(), spectrum.end())) throw std::invalid_argument("spectrum is not ascending");
  if (spectrum.size() < 10) throw std::invalid_argument("upper constant estimate needs at least 10 eigenvalues");
  const double threshold = positivity_threshold(params, geom);
  const double prefactor = sum_prefactor(params, geom);
  double partial = 0.0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    partial += spectrum[i];
    const double kd = static_cast<double>(i + 1);
    if (!(kd > threshold)) continue;
    const double growth = std::pow(kd, params.sumExponent());
    best = std::max(best, (partial - prefactor * growth * std::log(kd)) / growth);
  }
  if (!std::isfinite(best)) throw std::invalid_argument("no admissible k above the positivity threshold");
  return best;
}

double estimate_upper_constant(std::span<const double> spectrum, const SpectralParams& params,
                               const DomainGeometry& geom) {
  return std::max(0.0, raw_upper_residual(spectrum, params, geom));
}

BoundReport make_bound_report(const SpectralParams& params, const DomainGeometry& geom, long long k,
                              std::optional<double> computedSum) {
  BoundReport report;
  report.k = k;
  const LowerBound lb = lower_bound_sum(params, geom, k);
  report.lowerBound = lb.value;
  report.regime = lb.regime;
  if (k >= 2) {
    report.weylK = weyl_eigenvalue(params, geom, k);
    report.weylSum = weyl_sum(params, geom, k);
  }
  if (geom.hasLayerEstimate() && static_cast<double>(k) > positivity_threshold(params, geom)) {
    report.upperLeading = upper_bound_sum(params, geom, k, 0.0);
  }
  report.computedSum = computedSum;
  return report;
}

}  // namespace speclog
