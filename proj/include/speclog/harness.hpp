#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclog/bounds.hpp"
#include "speclog/coremath.hpp"
#include "speclog/geometry.hpp"
#include "speclog/planewave.hpp"
#include "speclog/solver.hpp"

namespace speclog {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// Experiment description read from a flat JSON document.
struct ExperimentConfig {
  SpectralParams params{1, 0.5};
  DomainGeometry geom = DomainGeometry::box({3.141592653589793});
  std::size_t basisSize = 200;
  long long kMax = 100;
  std::filesystem::path outputDir = "out";
  std::uint64_t seed = 20260101;
  Symbol symbol = Symbol::fractionalLog(0.5);

  // Quadrature overrides; unset fields take the per-basis defaults.
  std::optional<double> cutoffRadius;
  std::optional<int> nodesPerPanel;
  std::optional<int> panelsPerSpacing;
  std::optional<int> gradingLevels;
  std::optional<int> tailOrder;
  std::optional<double> singularityGuard;

  std::vector<double> cutoffRadii{20.0, 30.0, 40.0};
  std::vector<double> cutoffSigmas{0.02, 0.05, 0.1};
  ProbeConfig probe;
  std::vector<long long> asymptoticRanks{1000, 10000, 100000, 1000000};

  /// Per-basis defaults with the configured overrides applied.
  QuadratureConfig quadratureFor(const GalerkinBasis& basis) const;
  /// Throws std::invalid_argument naming the violated rule.
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerificationReport {
  std::vector<BoundReport> perK;
  std::vector<CheckResult> checks;
  nlohmann::json config;

  bool allPass() const;
  /// Full report; `generatedAt` goes to metadata alongside the per-check timings.
  nlohmann::json toJson(const std::string& generatedAt) const;
};

/// Check names in acceptance order.
const std::vector<std::string>& verification_check_names();

/// Runs every acceptance check; individual failures are recorded, infrastructure errors throw.
VerificationReport run_verification(const ExperimentConfig& config, std::ostream& log);

/// Removes metadata.timings and metadata.generated_at.
nlohmann::json strip_volatile(nlohmann::json report);

/// CLI commands; each returns the process exit status (0 pass, 1 check failure).
int cmd_bounds(const ExperimentConfig& config, std::ostream& log);
int cmd_solve(const ExperimentConfig& config, std::ostream& log);
int cmd_verify(const ExperimentConfig& config, std::ostream& log);
int cmd_asymptotics(const ExperimentConfig& config, std::ostream& log);
int cmd_cutoff(const ExperimentConfig& config, std::ostream& log);

/// Reads a CSV written by the commands back into rows of cells (header included).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace speclog
