#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "speclog/harness.hpp"

namespace speclog {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "n",           "s",
      "box_lengths", "volume",
      "layer_constant", "layer_max_width",
      "basis_size",  "kmax",
      "output_dir",  "seed",
      "symbol",      "symbol_order",
      "cutoff_radius", "nodes_per_panel",
      "panels_per_spacing", "grading_levels",
      "tail_order",  "singularity_guard",
      "cutoff_radii", "cutoff_sigmas",
      "probe_samples", "probe_padded_length",
      "probe_frequency_cutoff", "asymptotic_ranks"};
  return keys;
}

template <class T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("config key '{}': {}", key, e.what()));
  }
}

template <class T>
std::optional<T> get_optional(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return get<T>(doc, key);
}

}  // namespace

QuadratureConfig ExperimentConfig::quadratureFor(const GalerkinBasis& basis) const {
  QuadratureConfig q = default_quadrature(basis);
  if (cutoffRadius) q.cutoffRadius = *cutoffRadius;
  if (nodesPerPanel) q.nodesPerPanel = *nodesPerPanel;
  if (panelsPerSpacing) q.panelsPerSpacing = *panelsPerSpacing;
  if (gradingLevels) q.gradingLevels = *gradingLevels;
  if (tailOrder) q.tailOrder = *tailOrder;
  if (singularityGuard) q.singularityGuard = *singularityGuard;
  return q;
}

void ExperimentConfig::validate() const {
  geom.validate();
  if (geom.n != params.n()) throw std::invalid_argument("config: domain dimension differs from n");
  if (basisSize < 2) throw std::invalid_argument("config: basis_size must be at least 2");
  if (kMax < 1) throw std::invalid_argument("config: kmax must be positive");
  if (static_cast<std::size_t>(kMax) > basisSize / 2) {
    throw std::invalid_argument(fmt::format(
        "config invariant 'kmax <= basis_size / 2' failed: kmax = {}, basis_size = {} (only the lower half of the "
        "Ritz values is resolved)",
        kMax, basisSize));
  }
  if (symbol.kind == SymbolKind::fractionalLog && symbol.order != params.s()) {
    throw std::invalid_argument("config: fractional-log symbol order must equal s");
  }
  if (cutoffRadii.empty() || cutoffSigmas.empty()) throw std::invalid_argument("config: cutoff lists must be nonempty");
  const double rMin = std::exp(1.0 / params.homogeneity());
  for (std::size_t i = 0; i < cutoffRadii.size(); ++i) {
    if (!(cutoffRadii[i] >= rMin)) {
      throw std::invalid_argument(
          fmt::format("config: cutoff_radii[{}] = {} is below e^(1/(n+2s)) = {}", i, cutoffRadii[i], rMin));
    }
  }
  for (std::size_t i = 0; i < cutoffSigmas.size(); ++i) {
    if (!(cutoffSigmas[i] > 0.0)) {
      throw std::invalid_argument(fmt::format("config: cutoff_sigmas[{}] = {} must be positive", i, cutoffSigmas[i]));
    }
    if (geom.isBox() && !(cutoffSigmas[i] < 0.5 * geom.minLength())) {
      throw std::invalid_argument(fmt::format("config: cutoff_sigmas[{}] = {} must be below half the shortest side",
                                              i, cutoffSigmas[i]));
    }
  }
  for (std::size_t i = 0; i < asymptoticRanks.size(); ++i) {
    if (asymptoticRanks[i] < 3) throw std::invalid_argument(fmt::format("config: asymptotic_ranks[{}] must be >= 3", i));
    if (i > 0 && asymptoticRanks[i] <= asymptoticRanks[i - 1]) {
      throw std::invalid_argument("config: asymptotic_ranks must be strictly increasing");
    }
  }
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  const int n = doc.contains("n") ? get<int>(doc, "n") : 1;
  const double s = doc.contains("s") ? get<double>(doc, "s") : 0.5;
  c.params = SpectralParams(n, s);

  if (doc.contains("box_lengths") && doc.contains("volume")) {
    throw std::invalid_argument("config: give either box_lengths or volume, not both");
  }
  if (doc.contains("box_lengths")) {
    c.geom = DomainGeometry::box(get<std::vector<double>>(doc, "box_lengths"));
  } else if (doc.contains("volume")) {
    c.geom = DomainGeometry::withVolume(n, get<double>(doc, "volume"));
  } else {
    c.geom = DomainGeometry::box(std::vector<double>(static_cast<std::size_t>(n), 3.141592653589793));
  }
  if (auto v = get_optional<double>(doc, "layer_constant")) c.geom.layerConstant = *v;
  if (auto v = get_optional<double>(doc, "layer_max_width")) c.geom.layerMaxWidth = *v;

  if (auto v = get_optional<std::size_t>(doc, "basis_size")) c.basisSize = *v;
  if (auto v = get_optional<long long>(doc, "kmax")) c.kMax = *v;
  if (auto v = get_optional<std::string>(doc, "output_dir")) c.outputDir = *v;
  if (auto v = get_optional<std::uint64_t>(doc, "seed")) c.seed = *v;

  const std::string symbol = doc.contains("symbol") ? get<std::string>(doc, "symbol") : "fractional-log";
  if (symbol == "fractional-log") {
    if (doc.contains("symbol_order")) throw std::invalid_argument("config: symbol_order applies to 'fractional' only");
    c.symbol = Symbol::fractionalLog(s);
  } else if (symbol == "fractional") {
    c.symbol = Symbol::fractional(doc.contains("symbol_order") ? get<double>(doc, "symbol_order") : s);
  } else {
    throw std::invalid_argument("config: symbol must be 'fractional-log' or 'fractional', got '" + symbol + "'");
  }

  c.cutoffRadius = get_optional<double>(doc, "cutoff_radius");
  c.nodesPerPanel = get_optional<int>(doc, "nodes_per_panel");
  c.panelsPerSpacing = get_optional<int>(doc, "panels_per_spacing");
  c.gradingLevels = get_optional<int>(doc, "grading_levels");
  c.tailOrder = get_optional<int>(doc, "tail_order");
  c.singularityGuard = get_optional<double>(doc, "singularity_guard");

  if (auto v = get_optional<std::vector<double>>(doc, "cutoff_radii")) c.cutoffRadii = *v;
  if (auto v = get_optional<std::vector<double>>(doc, "cutoff_sigmas")) c.cutoffSigmas = *v;
  if (auto v = get_optional<std::size_t>(doc, "probe_samples")) c.probe.samples = *v;
  if (auto v = get_optional<double>(doc, "probe_padded_length")) c.probe.paddedLength = *v;
  if (auto v = get_optional<double>(doc, "probe_frequency_cutoff")) c.probe.frequencyCutoff = *v;
  if (auto v = get_optional<std::vector<long long>>(doc, "asymptotic_ranks")) c.asymptoticRanks = *v;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["n"] = c.params.n();
  doc["s"] = c.params.s();
  if (c.geom.isBox()) {
    doc["box_lengths"] = *c.geom.boxLengths;
  } else {
    doc["volume"] = c.geom.volume;
  }
  if (c.geom.layerConstant) doc["layer_constant"] = *c.geom.layerConstant;
  if (c.geom.layerMaxWidth) doc["layer_max_width"] = *c.geom.layerMaxWidth;
  doc["basis_size"] = c.basisSize;
  doc["kmax"] = c.kMax;
  doc["output_dir"] = c.outputDir.generic_string();
  doc["seed"] = c.seed;
  doc["symbol"] = c.symbol.kind == SymbolKind::fractionalLog ? "fractional-log" : "fractional";
  if (c.symbol.kind == SymbolKind::fractional) doc["symbol_order"] = c.symbol.order;
  if (c.cutoffRadius) doc["cutoff_radius"] = *c.cutoffRadius;
  if (c.nodesPerPanel) doc["nodes_per_panel"] = *c.nodesPerPanel;
  if (c.panelsPerSpacing) doc["panels_per_spacing"] = *c.panelsPerSpacing;
  if (c.gradingLevels) doc["grading_levels"] = *c.gradingLevels;
  if (c.tailOrder) doc["tail_order"] = *c.tailOrder;
  if (c.singularityGuard) doc["singularity_guard"] = *c.singularityGuard;
  doc["cutoff_radii"] = c.cutoffRadii;
  doc["cutoff_sigmas"] = c.cutoffSigmas;
  doc["probe_samples"] = c.probe.samples;
  doc["probe_padded_length"] = c.probe.paddedLength;
  doc["probe_frequency_cutoff"] = c.probe.frequencyCutoff;
  doc["asymptotic_ranks"] = c.asymptoticRanks;
  return doc;
}

}  // namespace speclog
