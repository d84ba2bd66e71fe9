#include "speclog/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace speclog {

DomainGeometry DomainGeometry::box(std::vector<double> lengths) {
  if (lengths.empty()) throw std::invalid_argument("box needs at least one side length");
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("box side lengths must be positive and finite");
  }
  DomainGeometry g;
  g.n = static_cast<int>(lengths.size());
  g.volume = std::accumulate(lengths.begin(), lengths.end(), 1.0, std::multiplies<>());
  double faces = 0.0;
  for (double l : lengths) faces += g.volume / l;
  g.layerConstant = 2.0 * faces;
  g.layerMaxWidth = *std::min_element(lengths.begin(), lengths.end()) / 2.0;
  g.boxLengths = std::move(lengths);
  return g;
}

DomainGeometry DomainGeometry::withVolume(int n, double volume) {
  DomainGeometry g;
  g.n = n;
  g.volume = volume;
  g.validate();
  return g;
}

double DomainGeometry::minLength() const {
  if (!boxLengths) throw std::invalid_argument("domain is not a box");
  return *std::min_element(boxLengths->begin(), boxLengths->end());
}

void DomainGeometry::validate() const {
  if (n < 1) throw std::invalid_argument("domain dimension must be >= 1");
  if (!(volume > 0.0) || !std::isfinite(volume)) throw std::invalid_argument("domain volume must be positive");
  if (boxLengths) {
    if (static_cast<int>(boxLengths->size()) != n) {
      throw std::invalid_argument("box has " + std::to_string(boxLengths->size()) + " lengths for dimension " +
                                  std::to_string(n));
    }
    const double prod = std::accumulate(boxLengths->begin(), boxLengths->end(), 1.0, std::multiplies<>());
    if (std::abs(prod - volume) > 1e-12 * volume) {
      throw std::invalid_argument("box volume does not match the product of its side lengths");
    }
  }
  if (layerConstant && !(*layerConstant > 0.0)) throw std::invalid_argument("layer constant must be positive");
  if (layerMaxWidth && !(*layerMaxWidth > 0.0)) throw std::invalid_argument("layer width t0 must be positive");
}

double box_layer_volume(const DomainGeometry& box, double t) {
  if (!box.boxLengths) throw std::invalid_argument("layer volume is only available for boxes");
  if (t <= 0.0) return 0.0;
  double inner = 1.0;
  for (double l : *box.boxLengths) inner *= std::max(0.0, l - 2.0 * t);
  return box.volume - inner;
}

double box_signed_distance(const DomainGeometry& box, std::span<const double> x) {
  if (!box.boxLengths) throw std::invalid_argument("signed distance is only available for boxes");
  const auto& len = *box.boxLengths;
  if (x.size() != len.size()) throw std::invalid_argument("point dimension does not match the box");
  double d = INFINITY;
  for (std::size_t i = 0; i < len.size(); ++i) d = std::min({d, x[i], len[i] - x[i]});
  return d;
}

}  // namespace speclog
