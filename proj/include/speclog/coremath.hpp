#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "speclog/geometry.hpp"

namespace speclog {

/// Space dimension n and fractional order s in (0, 1). Together they fix the
/// symbol |xi|^{2s} ln|xi|^2 and every exponent derived from it.
class SpectralParams {
 public:
  SpectralParams(int n, double s);

  int n() const { return n_; }
  double s() const { return s_; }
  /// n + 2s
  double homogeneity() const { return n_ + 2.0 * s_; }
  /// 2s / n
  double sizeExponent() const { return 2.0 * s_ / n_; }
  /// 1 + 2s/n, the growth exponent of eigenvalue sums.
  double sumExponent() const { return 1.0 + sizeExponent(); }

 private:
  int n_;
  double s_;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Radial profile w(r) = r^{2s} ln r^2 of the fractional-logarithmic symbol.
class RadialSymbol {
 public:
  explicit RadialSymbol(const SpectralParams& params) : s_(params.s()) {}

  /// w(r); the continuous extension w(0) = 0 is returned at r = 0.
  double value(double r) const;
  /// w'(r) = 2 r^{2s-1} (2s ln r + 1)
  double derivative(double r) const;
  /// Unique minimiser e^{-1/(2s)}.
  double minimizer() const;
  double minimum() const { return value(minimizer()); }

 private:
  double s_;
};

double symbol_radial(const SpectralParams& params, double r);

/// Integral of |z|^{2s} ln|z|^2 over the ball of radius R.
double ball_symbol_integral(const SpectralParams& params, double radius);

/// Psi_A(R) = A w(R) - M1 (w(R) |B_R| - int_{B_R} w), defined for R >= 1.
double psi_A(const SpectralParams& params, double m1, double mass, double radius);

/// Radius R_A = (A / (M1 omega_n))^{1/n} at which Psi_A is maximal.
double optimal_radius(const SpectralParams& params, double m1, double mass);

struct MassConstrainedBounds {
  double universal;
  std::optional<double> main;  // present iff A >= M1 omega_n
};

/// Lower bounds on M2 = int |z|^{2s} ln|z|^2 f over 0 <= f <= M1 with int f = A.
MassConstrainedBounds mass_constrained_bounds(const SpectralParams& params, double m1, double mass);

/// Uniform radial grid on [0, radius] used by the bathtub oracle.
struct RadialGrid {
  double radius = 0.0;
  std::size_t cells = 0;
};

/// Grid covering [0, max(2 R_A, 1)] with the given number of cells.
RadialGrid default_bathtub_grid(const SpectralParams& params, double m1, double mass, std::size_t cells);

struct BathtubResult {
  double value;        // discretised minimum of M2
  double cellError;    // bound on the error from the midpoint rule and the partially filled cell
};

/// Brute-force minimiser of M2 by the bathtub principle: fill radial shells in
/// ascending order of w with density M1 until the mass A is used up.
BathtubResult bathtub_minimum_oracle(const SpectralParams& params, double m1, double mass, const RadialGrid& grid);

/// S_k / ((c / Gamma(1+rho)) k^rho ln k) with S_k = sum_{j=2}^k (c / Gamma(rho)) j^{rho-1} ln j.
double karamata_sum_ratio(double rho, double c, long long k);

/// C^2 cutoff w_sigma(x) = ramp(dist(x, boundary) / sigma), zero outside the domain.
struct CutoffProfile {
  double sigma = 0.0;

  /// Quintic smoothstep t^3 (10 - 15 t + 6 t^2) clamped to [0, 1].
  static double ramp(double t);
  static double rampDerivative(double t);
  static double rampSecondDerivative(double t);
};

double cutoff_value(const CutoffProfile& profile, const DomainGeometry& box, std::span<const double> x);

/// int_Omega w_sigma^2 on a box, by tensor Gauss quadrature with breaks at sigma.
double cutoff_mass(const CutoffProfile& profile, const DomainGeometry& box);

}  // namespace speclog
