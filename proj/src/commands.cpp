#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "speclog/harness.hpp"
#include "speclog/matrix_cache.hpp"

namespace speclog {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

std::string cell(const std::optional<double>& v) { return v ? cell(*v) : "nan"; }

void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing: " + path.string());
}

// CSV plus a <name>.meta.json sidecar that records the command, config and seed.
void write_table(const ExperimentConfig& config, const std::string& command, const fs::path& path,
                 const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                 std::ostream& log) {
  std::string text;
  auto append = [&text](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text += ',';
      text += fields[i];
    }
    text += '\n';
  };
  append(header);
  for (const auto& r : rows) append(r);
  write_text(path, text);
  const json meta{{"command", command}, {"config", to_json(config)}, {"seed", config.seed}, {"version", kVersion}};
  write_text(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
  log << "wrote " << path.string() << '\n';
}

std::string hex(const std::array<std::uint8_t, 32>& digest, std::size_t bytes) {
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int cmd_bounds(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config.outputDir);
  const double threshold = positivity_threshold(config.params, config.geom);
  std::vector<std::vector<std::string>> rows;
  for (long long k = 1; k <= config.kMax; ++k) {
    const BoundReport b = make_bound_report(config.params, config.geom, k);
    rows.push_back({std::to_string(k), cell(b.lowerBound), to_string(b.regime), cell(b.weylK), cell(b.weylSum),
                    cell(b.upperLeading), cell(threshold)});
  }
  write_table(config, "bounds", config.outputDir / "bounds.csv",
              {"k", "lower_bound", "regime", "weyl_k", "weyl_sum", "upper_leading", "positivity_threshold"}, rows, log);
  return 0;
}

int cmd_solve(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  if (!config.geom.isBox()) throw std::invalid_argument("solve needs box_lengths in the config");
  ensure_output_dir(config.outputDir);
  const GalerkinBasis basis = GalerkinBasis::withSize(config.geom, config.basisSize);
  const QuadratureConfig quad = config.quadratureFor(basis);
  validate_quadrature(basis, quad);
  const auto digest = form_digest(basis, config.params, quad, config.symbol);
  const fs::path cachePath = config.outputDir / fmt::format("form-{}.slfm", hex(digest, 8));

  std::optional<FormMatrix> matrix = read_matrix_cache(cachePath, basis, config.params, quad, config.symbol);
  if (matrix) {
    log << "cache hit: loaded " << cachePath.string() << ", assembly skipped\n";
  } else {
    if (fs::exists(cachePath)) log << "cache at " << cachePath.string() << " is unreadable or stale; reassembling\n";
    log << "assembling " << basis.describe() << " with " << quad.describe() << " symbol " << config.symbol.tag()
        << '\n';
    const auto start = std::chrono::steady_clock::now();
    matrix = assemble_form_matrix(basis, config.params, quad, config.symbol);
    log << fmt::format("assembled in {:.2f} s (max tail error estimate {:.3e}, imaginary residual {:.3e})\n",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
                       matrix->errorEstimate.maxCoeff(), matrix->imaginaryResidual);
    write_matrix_cache(cachePath, *matrix);
    log << "wrote " << cachePath.string() << '\n';
  }

  const Spectrum sp = solve_spectrum(*matrix, config.geom);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) rows.push_back({std::to_string(i + 1), cell(sp.eigenvalues[i])});
  write_table(config, "solve", config.outputDir / "spectrum.csv", {"index", "value"}, rows, log);
  return 0;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config.outputDir);
  const VerificationReport report = run_verification(config, log);
  const fs::path path = config.outputDir / "verify_report.json";
  write_text(path, report.toJson(utc_timestamp()).dump(2) + "\n");
  log << "wrote " << path.string() << '\n';
  log << (report.allPass() ? "all checks passed\n" : "some checks failed\n");
  return report.allPass() ? 0 : 1;
}

int cmd_asymptotics(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config.outputDir);
  const double rho = config.params.sumExponent();
  const long long top = config.asymptoticRanks.back();
  std::vector<double> weylRatio;
  double weylPartial = 0.0;
  std::size_t next = 0;
  for (long long j = 2; j <= top; ++j) {
    weylPartial += weyl_eigenvalue(config.params, config.geom, j);
    if (j == config.asymptoticRanks[next]) {
      weylRatio.push_back(weylPartial / weyl_sum(config.params, config.geom, j));
      ++next;
    }
  }

  bool within = true;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < config.asymptoticRanks.size(); ++i) {
    const long long k = config.asymptoticRanks[i];
    const double bound = 1.2 / std::log(static_cast<double>(k));
    const double ratio2 = karamata_sum_ratio(2.0, 1.0, k);
    const double ratioP = karamata_sum_ratio(rho, std::tgamma(rho), k);
    const bool ok = std::abs(ratio2 - 1.0) <= bound && std::abs(ratioP - 1.0) <= bound &&
                    std::abs(weylRatio[i] - 1.0) <= bound;
    within = within && ok;
    rows.push_back({std::to_string(k), cell(ratio2), cell(ratioP), cell(bound), cell(weylRatio[i]), ok ? "1" : "0"});
  }
  write_table(config, "asymptotics", config.outputDir / "asymptotics.csv",
              {"k", "ratio_rho2", "ratio_sum_exponent", "bound", "weyl_consistency", "within_bound"}, rows, log);
  return within ? 0 : 1;
}

int cmd_cutoff(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  if (config.params.n() != 1 || !config.geom.isBox()) throw std::invalid_argument("cutoff probe needs n = 1 and a box");
  ensure_output_dir(config.outputDir);

  struct Row {
    double r, sigma;
    PlaneWaveEnergy e;
  };
  std::vector<Row> table;
  for (double sigma : config.cutoffSigmas) {
    for (double r : config.cutoffRadii) {
      table.push_back({r, sigma, cutoff_planewave_energy({sigma}, config.geom, config.params, r, config.probe)});
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> radii, sigmas, remainders;
  for (const auto& row : table) {
    radii.push_back(row.r);
    sigmas.push_back(row.sigma);
    remainders.push_back(row.e.remainder);
  }
  std::optional<ScalingFit> fit;
  if (config.cutoffRadii.size() >= 2 && config.cutoffSigmas.size() >= 2) {
    fit = fit_remainder_scaling(radii, sigmas, remainders);
  }
  auto slice_slope = [&](bool alongR, double fixed) {
    std::vector<double> x, y;
    for (const auto& row : table) {
      if ((alongR ? row.sigma : row.r) != fixed) continue;
      x.push_back(alongR ? row.r : row.sigma);
      y.push_back(row.e.remainder);
    }
    return x.size() >= 2 ? loglog_slope(x, y) : nan;
  };

  std::vector<std::vector<std::string>> rows;
  for (const auto& row : table) {
    const double identity = row.e.mainTerm / (planewave_main_coefficient(config.params, row.r) * row.e.cutoffMass);
    rows.push_back({cell(row.r), cell(row.sigma), cell(row.e.lhs), cell(row.e.mainTerm), cell(row.e.remainder),
                    cell(row.e.cutoffMass), cell(identity), cell(slice_slope(true, row.sigma)),
                    cell(slice_slope(false, row.r)), cell(fit ? fit->rExponent : nan),
                    cell(fit ? fit->sigmaExponent : nan)});
  }
  write_table(config, "cutoff", config.outputDir / "cutoff.csv",
              {"r", "sigma", "lhs", "main_term", "remainder", "cutoff_mass", "identity_ratio", "r_slope_at_sigma",
               "sigma_slope_at_r", "r_exponent", "sigma_exponent"},
              rows, log);

  const double rLimit = config.params.homogeneity() + 0.3;
  json summary{{"points", table.size()}, {"r_exponent_limit", rLimit}, {"sigma_exponent_range", {0.7, 1.3}}};
  bool pass = false;
  if (fit) {
    const bool rOk = fit->rExponent <= rLimit;
    const bool sOk = fit->sigmaExponent >= 0.7 && fit->sigmaExponent <= 1.3;
    pass = rOk && sOk;
    summary["fit"] = {{"intercept", fit->intercept},
                      {"r_exponent", fit->rExponent},
                      {"sigma_exponent", fit->sigmaExponent},
                      {"residual_norm", fit->residualNorm}};
    summary["r_exponent_ok"] = rOk;
    summary["sigma_exponent_ok"] = sOk;
    log << fmt::format("fit: remainder ~ r^{:.4f} sigma^{:.4f} (r limit {:.2f}, sigma range [0.7, 1.3])\n",
                       fit->rExponent, fit->sigmaExponent, rLimit);
  } else {
    summary["fit"] = nullptr;
    log << "fit skipped: needs at least two radii and two widths\n";
  }
  summary["pass"] = pass;
  write_text(config.outputDir / "cutoff_summary.json", summary.dump(2) + "\n");
  return fit && !pass ? 1 : 0;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace speclog
