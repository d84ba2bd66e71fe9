#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "speclog/coremath.hpp"
#include "speclog/geometry.hpp"

namespace speclog {

inline constexpr int kMaxSolverDim = 2;

using MultiIndex = std::array<int, kMaxSolverDim>;

/// Zero-extended tensor sine basis e_j(x) = prod_i sqrt(2/L_i) sin(j_i pi x_i / L_i)
/// on a box, indices in lexicographic order (last axis fastest).
struct GalerkinBasis {
  DomainGeometry box;
  int maxIndexPerAxis = 0;
  std::vector<MultiIndex> indexSet;

  static GalerkinBasis make(const DomainGeometry& box, int maxIndexPerAxis);
  /// Basis with `size` functions: maxIndex = size in 1D, size must be a perfect square in 2D.
  static GalerkinBasis withSize(const DomainGeometry& box, std::size_t size);

  int dim() const { return box.n; }
  std::size_t size() const { return indexSet.size(); }
  /// Largest |j pi / L| over all axes.
  double maxResonance() const;
  std::string describe() const;
};

enum class SymbolKind : std::uint8_t { fractionalLog = 1, fractional = 2 };

/// Fourier symbol of the quadratic form: |xi|^{2s} ln|xi|^2 or |xi|^{2s'}.
struct Symbol {
  SymbolKind kind = SymbolKind::fractionalLog;
  double order = 0.5;  // s for fractional-log, s' for fractional

  static Symbol fractionalLog(double s) { return {SymbolKind::fractionalLog, s}; }
  static Symbol fractional(double order) { return {SymbolKind::fractional, order}; }

  /// symbol value at radius r >= 0 (0 at r = 0 except fractional order 0, which is 1).
  double value(double r) const;
  /// d/dr of the symbol.
  double derivative(double r) const;
  std::string tag() const;
};

/// Quadrature layout for the symbol integrals. Per axis the half line [0, cutoff]
/// is split on the resonance lattice pi/L into panels of Gauss-Legendre nodes,
/// with geometric grading toward xi = 0; the part beyond the cutoff is added
/// through analytic tail terms.
struct QuadratureConfig {
  double cutoffRadius = 0.0;
  int nodesPerPanel = 12;
  int panelsPerSpacing = 1;
  int gradingLevels = 24;
  /// 0: no tail (n = 1 only); 1: non-oscillatory mean tail; 2, 3: plus the first
  /// and second integration-by-parts terms of the oscillatory tail.
  int tailOrder = 3;
  double singularityGuard = 1e-3;

  std::string describe() const;
};

/// Defaults for a basis: cutoff 2.5 x the largest resonance plus one lattice step (twelve in 2D),
/// and never below 64 lattice steps.
QuadratureConfig default_quadrature(const GalerkinBasis& basis);

/// Throws std::invalid_argument naming the failing invariant.
void validate_quadrature(const GalerkinBasis& basis, const QuadratureConfig& quad);

/// (2 pi)^{-1/2} sqrt(2/L) (j pi / L) (1 - (-1)^j e^{-i L xi}) / ((j pi / L)^2 - xi^2),
/// with a guarded analytic branch near xi = +-j pi / L.
std::complex<double> basis_transform_1d(double length, int j, double xi, double singularityGuard = 1e-3);

struct FormProvenance {
  std::string basis;
  std::string quadrature;
  Symbol symbol;
  std::array<std::uint8_t, 32> digest{};
};

/// Symmetric Galerkin matrix of int symbol(|xi|) e_j^(xi) conj(e_k^(xi)) dxi.
struct FormMatrix {
  Eigen::MatrixXd entries;
  SpectralParams params;
  FormProvenance provenance;
  /// Per-entry estimate of the quadrature error left after the tail terms; empty when loaded from cache.
  Eigen::MatrixXd errorEstimate;
  /// Largest |imaginary part| / magnitude seen before the imaginary parts were dropped.
  double imaginaryResidual = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// 32-byte digest identifying the matrix produced by (basis, params, quadrature, symbol).
std::array<std::uint8_t, 32> form_digest(const GalerkinBasis& basis, const SpectralParams& params,
                                         const QuadratureConfig& quad, const Symbol& symbol);

/// Imaginary residual tolerance relative to the entry magnitude.
inline constexpr double kImaginaryTolerance = 1e-10;
/// Tail error tolerance relative to the diagonal entry.
inline constexpr double kTailTolerance = 1e-8;

/// Assembles the form matrix. Parallel over matrix rows; results are bitwise
/// identical for any thread count. `threads` = 0 uses SPECLOG_THREADS or the hardware count.
FormMatrix assemble_form_matrix(const GalerkinBasis& basis, const SpectralParams& params,
                                const QuadratureConfig& quad, const Symbol& symbol, unsigned threads = 0);

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  std::size_t basisSize = 0;
  SpectralParams params;
  DomainGeometry geom;
};

/// All Rayleigh-Ritz values of the form (identity mass matrix), ascending.
Spectrum solve_spectrum(const FormMatrix& matrix, const DomainGeometry& geom);

/// max_{jk} |(A^{s+h} - A^{s-h}) / (2h) - A^{s+ln}| / max(1, |A^{s+ln}|); checks the symbol tags.
double derivative_oracle_error(const FormMatrix& lower, const FormMatrix& upper, const FormMatrix& logarithmic,
                               double h);

/// Assembles the three matrices for the central s-difference and compares.
double derivative_oracle_check(const GalerkinBasis& basis, const SpectralParams& params,
                               const QuadratureConfig& quad, double h, unsigned threads = 0);

unsigned resolve_thread_count(unsigned requested);

}  // namespace speclog
