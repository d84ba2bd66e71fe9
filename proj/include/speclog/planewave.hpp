#pragma once

#include <cstddef>
#include <span>

#include "speclog/coremath.hpp"
#include "speclog/geometry.hpp"

namespace speclog {

/// Sampling of the cutoff function for its discrete Fourier transform.
struct ProbeConfig {
  std::size_t samples = std::size_t{1} << 18;
  double paddedLength = 128.0;       // period T of the sampled window, the domain sits in its middle
  double frequencyCutoff = 1000.0;   // band |xi| <= cutoff that must be resolved together with the shift r
};

/// Energy of the plane-wave family {w_sigma e^{i z x} : |z| < r} in the quadratic form,
/// split into the volume term and the boundary remainder.
struct PlaneWaveEnergy {
  double lhs = 0.0;         // int_{|z|<r} int m(xi) |w_sigma^(xi + z)|^2 dxi dz
  double mainTerm = 0.0;    // ball coefficient(r) * int w_sigma^2
  double remainder = 0.0;   // lhs - mainTerm
  double cutoffMass = 0.0;  // int w_sigma^2
  double nyquist = 0.0;     // pi * samples / paddedLength
};

/// int_{|z|<r} |z|^{2s} ln|z|^2 dz, evaluated from the expanded form
/// (2 n omega_n / (n+2s)) r^{n+2s} (ln r - 1/(n+2s)); agrees with ball_symbol_integral.
double planewave_main_coefficient(const SpectralParams& params, double r);

/// 1D only. The inner z-integral is done in closed form through the antiderivative of
/// the symbol; the outer frequency integral runs over the DFT bins of the sampled cutoff.
PlaneWaveEnergy cutoff_planewave_energy(const CutoffProfile& profile, const DomainGeometry& geom,
                                        const SpectralParams& params, double r, const ProbeConfig& config = {});

/// |w_sigma^(eta)|^2 for each eta by Gauss quadrature of the defining integral (slow; test oracle).
double cutoff_transform_sq(const CutoffProfile& profile, const DomainGeometry& geom, double eta);

/// Least-squares fit log|remainder| = c + a log r + b log sigma.
struct ScalingFit {
  double intercept = 0.0;
  double rExponent = 0.0;
  double sigmaExponent = 0.0;
  double residualNorm = 0.0;
};

ScalingFit fit_remainder_scaling(std::span<const double> radii, std::span<const double> sigmas,
                                 std::span<const double> remainders);

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace speclog
