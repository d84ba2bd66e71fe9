#pragma once

#include <optional>
#include <span>

#include "speclog/coremath.hpp"
#include "speclog/geometry.hpp"

namespace speclog {

enum class BoundRegime { universal, main };

const char* to_string(BoundRegime regime);

struct LowerBound {
  double value;
  BoundRegime regime;
};

/// Per-k record of the bound evaluators and, when available, a computed eigenvalue sum.
struct BoundReport {
  long long k = 0;
  double lowerBound = 0.0;
  BoundRegime regime = BoundRegime::universal;
  std::optional<double> upperLeading;  // k above the positivity threshold only
  std::optional<double> weylK;         // k >= 2 only
  std::optional<double> weylSum;       // k >= 2 only
  std::optional<double> computedSum;
};

/// Shared prefactor (2/(n+2s)) (2 pi)^{2s} (omega_n |Omega|)^{-2s/n}.
double sum_prefactor(const SpectralParams& params, const DomainGeometry& geom);

/// Rank at and above which the main (logarithmic) lower bound applies: (2 pi)^{-n} omega_n |Omega|.
double main_bound_threshold(const SpectralParams& params, const DomainGeometry& geom);

/// Berezin-Li-Yau type lower bound on sum_{j<=k} lambda_j; falls back to the
/// universal bound below the main-regime threshold.
LowerBound lower_bound_sum(const SpectralParams& params, const DomainGeometry& geom, long long k);

struct LeadingSplit {
  double leading;     // prefactor k^{1+2s/n} ln k
  double correction;  // prefactor (ln((2 pi)^n / (omega_n |Omega|)) - n/(n+2s)) k^{1+2s/n}
};

LeadingSplit leading_split(const SpectralParams& params, const DomainGeometry& geom, long long k);

/// (omega_n |Omega| / (2 pi)^n) e^{n/(n+2s)}: eigenvalue sums are positive for every k above it.
double positivity_threshold(const SpectralParams& params, const DomainGeometry& geom);

/// (2 pi)^n omega_n^{-1} e^{-n/(n+2s)}: domains of smaller volume have lambda_1 > 0.
double small_volume_threshold(const SpectralParams& params);

/// Asymptotic k-th eigenvalue (2/n) (2 pi)^{2s} (omega_n |Omega|)^{-2s/n} k^{2s/n} ln k.
double weyl_eigenvalue(const SpectralParams& params, const DomainGeometry& geom, long long k);

/// Asymptotic eigenvalue sum (2/(n+2s)) (2 pi)^{2s} (omega_n |Omega|)^{-2s/n} k^{1+2s/n} ln k.
double weyl_sum(const SpectralParams& params, const DomainGeometry& geom, long long k);

/// Kroger-type upper bound: leading term plus C k^{1+2s/n}, for k above the positivity threshold.
double upper_bound_sum(const SpectralParams& params, const DomainGeometry& geom, long long k, double constant);

/// Empirical constant for the upper bound: max over admissible k of
/// (sum_{j<=k} lambda_j - leading(k)) / k^{1+2s/n}, floored at zero.
double estimate_upper_constant(std::span<const double> spectrum, const SpectralParams& params,
                               const DomainGeometry& geom);

/// Same maximum without the floor; useful for diagnostics.
double raw_upper_residual(std::span<const double> spectrum, const SpectralParams& params, const DomainGeometry& geom);

BoundReport make_bound_report(const SpectralParams& params, const DomainGeometry& geom, long long k,
                              std::optional<double> computedSum = std::nullopt);

}  // namespace speclog
