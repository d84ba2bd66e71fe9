#pragma once

#include <optional>
#include <span>
#include <vector>

namespace speclog {

/// Bounded domain description: volume, optional box side lengths and the
/// boundary-layer estimate |Omega_t| <= C * t for 0 < t <= t0.
struct DomainGeometry {
  int n = 1;
  double volume = 0.0;
  std::optional<std::vector<double>> boxLengths;
  std::optional<double> layerConstant;  // C_Omega
  std::optional<double> layerMaxWidth;  // t0

  /// Axis-aligned box (0, L_1) x ... x (0, L_n) with the inner-parallel-body
  /// layer constants C = 2 * sum_i |Omega| / L_i and t0 = min(L_i) / 2.
  static DomainGeometry box(std::vector<double> lengths);

  /// Domain known only through its volume; layer constants unset.
  static DomainGeometry withVolume(int n, double volume);

  bool isBox() const { return boxLengths.has_value(); }
  bool hasLayerEstimate() const { return layerConstant.has_value() && layerMaxWidth.has_value(); }
  double minLength() const;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Exact volume of {x in box : dist(x, boundary) < t}.
double box_layer_volume(const DomainGeometry& box, double t);

/// Distance from x to the box boundary; negative outside the box.
double box_signed_distance(const DomainGeometry& box, std::span<const double> x);

}  // namespace speclog
