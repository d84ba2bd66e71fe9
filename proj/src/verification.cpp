#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "speclog/harness.hpp"
#include "speclog/oracles.hpp"

namespace speclog {

namespace {

using nlohmann::json;

// Uniform double in [0, 1) from the top 53 bits; independent of the standard library's distributions.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 gen_;
};

std::string num(double v) { return fmt::format("{:.6g}", v); }

// Lazily assembled spectra shared between checks.
class SpectrumCache {
 public:
  explicit SpectrumCache(const ExperimentConfig& config) : config_(config) {}

  const FormMatrix& matrix(std::size_t size) {
    auto it = matrices_.find(size);
    if (it == matrices_.end()) {
      const GalerkinBasis basis = GalerkinBasis::withSize(config_.geom, size);
      it = matrices_.emplace(size, assemble_form_matrix(basis, config_.params, config_.quadratureFor(basis),
                                                        Symbol::fractionalLog(config_.params.s())))
               .first;
    }
    return it->second;
  }

  const std::vector<double>& eigenvalues(std::size_t size) {
    auto it = spectra_.find(size);
    if (it == spectra_.end()) it = spectra_.emplace(size, solve_spectrum(matrix(size), config_.geom).eigenvalues).first;
    return it->second;
  }

 private:
  const ExperimentConfig& config_;
  std::map<std::size_t, FormMatrix> matrices_;
  std::map<std::size_t, std::vector<double>> spectra_;
};

CheckResult closed_form_vs_quadrature() {
  CheckResult r{"closed_form_vs_quadrature", false, 0.0, 1e-8, "", 0.0};
  double worst = 0.0;
  std::string where;
  for (int n : {1, 2, 3}) {
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      for (double R : {0.5, 1.0, 2.0, 5.0}) {
        const SpectralParams p(n, s);
        const double closed = ball_symbol_integral(p, R);
        const double oracle = ball_integral_quadrature(p, R);
        const double err = std::abs(closed - oracle) / std::abs(oracle);
        if (err > worst) {
          worst = err;
          where = fmt::format("n={} s={} R={}", n, s, R);
        }
      }
    }
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = "max relative error over 60 (n, s, R) points, worst at " + where;
  return r;
}

CheckResult bathtub_oracle(std::uint64_t seed) {
  CheckResult r{"bathtub_oracle", false, 0.0, 1e-3, "", 0.0};
  SeededUniform rng(seed ^ 0x6c656d6d61ULL);
  constexpr std::size_t kCells = 10000;
  double worst = 0.0;
  int belowMain = 0;
  int belowUniversal = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = rng.next() < 0.5 ? 1 : 2;
    const SpectralParams p(n, rng.between(0.05, 0.95));
    const double m1 = rng.between(0.2, 5.0);
    const double mass = m1 * unit_ball_volume(n) * rng.between(1.0, 10.0);
    const MassConstrainedBounds bounds = mass_constrained_bounds(p, m1, mass);
    const BathtubResult oracle = bathtub_minimum_oracle(p, m1, mass, default_bathtub_grid(p, m1, mass, kCells));
    worst = std::max(worst, std::abs(oracle.value - *bounds.main) / std::max(1.0, std::abs(*bounds.main)));
    if (oracle.value < *bounds.main - oracle.cellError) ++belowMain;
  }
  for (int i = 0; i < 50; ++i) {
    const int n = rng.next() < 0.5 ? 1 : 2;
    const SpectralParams p(n, rng.between(0.05, 0.95));
    const double m1 = rng.between(0.2, 5.0);
    const double mass = m1 * unit_ball_volume(n) * rng.between(0.01, 0.99);
    const MassConstrainedBounds bounds = mass_constrained_bounds(p, m1, mass);
    const BathtubResult oracle = bathtub_minimum_oracle(p, m1, mass, default_bathtub_grid(p, m1, mass, kCells));
    if (oracle.value < bounds.universal - oracle.cellError) ++belowUniversal;
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance && belowMain == 0 && belowUniversal == 0;
  r.detail = fmt::format(
      "max relative gap to the main bound over 50 cases at {} cells; {} cases below main - cell error; "
      "{} of 50 small-mass cases below the universal bound",
      kCells, belowMain, belowUniversal);
  return r;
}

CheckResult psi_optimization(std::uint64_t seed) {
  CheckResult r{"psi_optimization", false, 0.0, 1e-12, "", 0.0};
  SeededUniform rng(seed ^ 0x707369ULL);
  double identity = 0.0;
  double excess = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng.next() * 3.0);
    const SpectralParams p(n, rng.between(0.05, 0.95));
    const double m1 = rng.between(0.2, 5.0);
    const double mass = m1 * unit_ball_volume(n) * rng.between(1.0, 100.0);
    const double ra = optimal_radius(p, m1, mass);
    const double peak = psi_A(p, m1, mass, ra);
    const double expected = m1 * ball_symbol_integral(p, ra);
    identity = std::max(identity, std::abs(peak - expected) / std::abs(expected));
    constexpr int kGrid = 2000;
    for (int g = 0; g <= kGrid; ++g) {
      const double R = 1.0 + (10.0 * ra - 1.0) * g / kGrid;
      excess = std::max(excess, (psi_A(p, m1, mass, R) - peak) / std::abs(peak));
    }
  }
  r.measured = identity;
  r.pass = identity <= r.tolerance && excess <= 1e-10;
  r.detail = fmt::format(
      "max relative |Psi(R_A) - M1 ball(R_A)| over 50 cases; max (Psi(R) - Psi(R_A)) / |Psi(R_A)| on [1, 10 R_A] = {} "
      "(allowed 1e-10)",
      num(excess));
  return r;
}

CheckResult karamata_tauberian() {
  CheckResult r{"karamata_tauberian", false, 0.0, 1.2, "", 0.0};
  double worst = 0.0;
  std::string ratios;
  for (long long k : {1000LL, 10000LL, 100000LL, 1000000LL}) {
    const double ratio = karamata_sum_ratio(2.0, 1.0, k);
    worst = std::max(worst, std::abs(ratio - 1.0) * std::log(static_cast<double>(k)));
    ratios += fmt::format("{}k={}:{:.10f}", ratios.empty() ? "" : " ", k, ratio);
  }
  const SpectralParams p(1, 0.5);
  const DomainGeometry box = DomainGeometry::box({std::numbers::pi});
  constexpr long long kRank = 100000;
  double sum = 0.0;
  for (long long j = 2; j <= kRank; ++j) sum += weyl_eigenvalue(p, box, j);
  const double weyl = sum / weyl_sum(p, box, kRank);
  const double weylScaled = std::abs(weyl - 1.0) * std::log(static_cast<double>(kRank));
  r.measured = std::max(worst, weylScaled);
  r.pass = r.measured <= r.tolerance;
  r.detail = fmt::format("max |ratio - 1| ln k; rho=2 ratios {}; Weyl-sum consistency at k={}: {:.10f}", ratios, kRank,
                         weyl);
  return r;
}

CheckResult classical_limit(const ExperimentConfig& config) {
  CheckResult r{"classical_limit", false, 0.0, 1e-4, "", 0.0};
  const DomainGeometry box = DomainGeometry::box({std::numbers::pi});
  const GalerkinBasis basis = GalerkinBasis::withSize(box, 200);
  const FormMatrix a = assemble_form_matrix(basis, config.params, default_quadrature(basis), Symbol::fractional(1.0));
  const Spectrum sp = solve_spectrum(a, box);
  double worst = 0.0;
  for (int j = 1; j <= 20; ++j) {
    const double exact = static_cast<double>(j) * j;
    worst = std::max(worst, std::abs(sp.eigenvalues[static_cast<std::size_t>(j - 1)] - exact) / exact);
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = "max relative error to j^2, j <= 20, fractional order 1 on (0, pi), basis 200";
  return r;
}

CheckResult derivative_oracle(const ExperimentConfig& config) {
  CheckResult r{"derivative_oracle", false, 0.0, 1e-4, "", 0.0};
  const GalerkinBasis basis = GalerkinBasis::withSize(config.geom, 20);
  const QuadratureConfig quad = config.quadratureFor(basis);
  const double coarse = derivative_oracle_check(basis, config.params, quad, 1e-2);
  const double fine = derivative_oracle_check(basis, config.params, quad, 1e-3);
  const double order = std::log10(coarse / fine);
  r.measured = fine;
  r.pass = fine <= r.tolerance && order >= 1.7 && order <= 2.3;
  r.detail = fmt::format("error at h=1e-3 (basis 20); error at h=1e-2 = {}; observed order {} (expected 2 +- 0.3)",
                         num(coarse), num(order));
  return r;
}

CheckResult lower_bound_sandwich(const ExperimentConfig& config, SpectrumCache& cache) {
  CheckResult r{"lower_bound_sandwich", false, 0.0, 0.0, "", 0.0};
  const auto& ev = cache.eigenvalues(config.basisSize);
  const long long kTop = static_cast<long long>(config.basisSize / 2);
  double margin = INFINITY;
  long long worstK = 0;
  double sum = 0.0;
  for (long long k = 1; k <= kTop; ++k) {
    sum += ev[static_cast<std::size_t>(k - 1)];
    const double gap = sum - lower_bound_sum(config.params, config.geom, k).value;
    if (gap < margin) {
      margin = gap;
      worstK = k;
    }
  }
  r.measured = margin;
  r.pass = margin > 0.0;
  r.detail = fmt::format("min over k <= {} of (Ritz sum - lower bound), attained at k = {}; must be > 0", kTop, worstK);
  return r;
}

CheckResult positivity_threshold_check(const ExperimentConfig& config, SpectrumCache& cache) {
  CheckResult r{"positivity_threshold_check", false, 0.0, 0.0, "", 0.0};
  const auto& ev = cache.eigenvalues(config.basisSize);
  const double threshold = positivity_threshold(config.params, config.geom);
  const long long kTop = static_cast<long long>(config.basisSize / 2);
  double minSum = INFINITY;
  double sum = 0.0;
  for (long long k = 1; k <= kTop; ++k) {
    sum += ev[static_cast<std::size_t>(k - 1)];
    if (static_cast<double>(k) > threshold) minSum = std::min(minSum, sum);
  }
  const DomainGeometry unit = DomainGeometry::box({1.0});
  const GalerkinBasis basis = GalerkinBasis::withSize(unit, config.basisSize);
  const FormMatrix a = assemble_form_matrix(basis, config.params, default_quadrature(basis),
                                            Symbol::fractionalLog(config.params.s()));
  const double lambda1 = solve_spectrum(a, unit).eigenvalues.front();
  const double smallVolume = small_volume_threshold(config.params);
  r.measured = std::min(minSum, lambda1);
  r.pass = minSum > 0.0 && lambda1 > 0.0 && unit.volume < smallVolume;
  r.detail = fmt::format(
      "min Ritz sum over {} < k <= {} = {}; lambda_1 on (0, 1) = {} (|Omega| = 1 < small-volume threshold {})",
      num(threshold), kTop, num(minSum), num(lambda1), num(smallVolume));
  return r;
}

CheckResult ritz_monotonicity(const ExperimentConfig& config) {
  CheckResult r{"ritz_monotonicity", false, 0.0, 1e-9, "", 0.0};
  const std::size_t big = config.basisSize;
  const std::size_t small = big / 2;
  const GalerkinBasis bigBasis = GalerkinBasis::withSize(config.geom, big);
  const GalerkinBasis smallBasis = GalerkinBasis::withSize(config.geom, small);
  // One quadrature for both, so the smaller matrix is exactly the leading block of the larger one.
  const QuadratureConfig quad = config.quadratureFor(bigBasis);
  const Symbol symbol = Symbol::fractionalLog(config.params.s());
  const auto evBig = solve_spectrum(assemble_form_matrix(bigBasis, config.params, quad, symbol), config.geom).eigenvalues;
  const auto evSmall =
      solve_spectrum(assemble_form_matrix(smallBasis, config.params, quad, symbol), config.geom).eigenvalues;
  double worst = -INFINITY;
  for (std::size_t j = 0; j < small; ++j) worst = std::max(worst, evBig[j] - evSmall[j]);
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = fmt::format("max_j (lambda_j(basis {}) - lambda_j(basis {})), shared quadrature", big, small);
  return r;
}

CheckResult upper_bound_trend(const ExperimentConfig& config, SpectrumCache& cache) {
  CheckResult r{"upper_bound_trend", false, 0.0, 0.0, "", 0.0};
  const std::size_t base = config.basisSize;
  const std::size_t doubled = 2 * base;
  const auto& evBig = cache.eigenvalues(doubled);
  const auto& evBase = cache.eigenvalues(base);

  std::vector<double> rho;
  std::string rhoText;
  double sum = 0.0;
  std::size_t next = 0;
  const std::vector<long long> ranks{8, 16, 32, 64};
  for (long long k = 1; k <= ranks.back(); ++k) {
    sum += evBig[static_cast<std::size_t>(k - 1)];
    if (next < ranks.size() && k == ranks[next]) {
      rho.push_back(sum / weyl_sum(config.params, config.geom, k));
      rhoText += fmt::format("{}rho_{}={:.6f}", rhoText.empty() ? "" : " ", k, rho.back());
      ++next;
    }
  }
  double maxIncrease = -INFINITY;
  for (std::size_t i = 1; i < rho.size(); ++i) maxIncrease = std::max(maxIncrease, rho[i] - rho[i - 1]);

  const std::span<const double> resolvedBase(evBase.data(), base / 2);
  const std::span<const double> resolvedBig(evBig.data(), doubled / 2);
  const double rawBase = raw_upper_residual(resolvedBase, config.params, config.geom);
  const double rawBig = raw_upper_residual(resolvedBig, config.params, config.geom);
  const double cBase = estimate_upper_constant(resolvedBase, config.params, config.geom);
  const double cBig = estimate_upper_constant(resolvedBig, config.params, config.geom);
  const double spread = std::abs(cBase - cBig);
  const bool stable = spread <= 0.2 * std::max(cBase, cBig);
  r.measured = maxIncrease;
  r.pass = maxIncrease <= 0.0 && stable;
  r.detail = fmt::format(
      "max rho_(2k) - rho_k over k in {{8,16,32,64}} at basis {} (must be <= 0): {}; upper constant basis {} = {} "
      "(raw {}), basis {} = {} (raw {}), stable within 20%: {}",
      doubled, rhoText, base, num(cBase), num(rawBase), doubled, num(cBig), num(rawBig), stable ? "yes" : "no");
  return r;
}

CheckResult planewave_probe(const ExperimentConfig& config) {
  CheckResult r{"planewave_probe", false, 0.0, 0.0, "", 0.0};
  double identity = 0.0;
  for (int n : {1, 2, 3}) {
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const SpectralParams p(n, s);
      for (double radius : {2.0, 5.0, 20.0, 30.0, 40.0}) {
        const double a = planewave_main_coefficient(p, radius);
        identity = std::max(identity, std::abs(a / ball_symbol_integral(p, radius) - 1.0));
      }
    }
  }
  std::vector<double> radii;
  std::vector<double> sigmas;
  std::vector<double> remainders;
  for (double sigma : config.cutoffSigmas) {
    for (double radius : config.cutoffRadii) {
      const PlaneWaveEnergy e = cutoff_planewave_energy({sigma}, config.geom, config.params, radius, config.probe);
      radii.push_back(radius);
      sigmas.push_back(sigma);
      remainders.push_back(e.remainder);
    }
  }
  const ScalingFit fit = fit_remainder_scaling(radii, sigmas, remainders);
  const double rLimit = config.params.homogeneity() + 0.3;
  r.measured = fit.sigmaExponent;
  r.tolerance = 0.3;
  const bool identityOk = identity <= 1e-12;
  const bool rOk = fit.rExponent <= rLimit;
  const bool sigmaOk = fit.sigmaExponent >= 0.7 && fit.sigmaExponent <= 1.3;
  r.pass = identityOk && rOk && sigmaOk;
  std::string remText;
  for (std::size_t i = 0; i < remainders.size(); ++i) {
    remText += fmt::format("{}(r={},sigma={}):{}", remText.empty() ? "" : " ", radii[i], sigmas[i], num(remainders[i]));
  }
  r.detail = fmt::format(
      "fitted sigma exponent (must lie in [0.7, 1.3]); r exponent {} (must be <= {}); ball-coefficient identity max "
      "deviation {} (must be <= 1e-12); remainders {}",
      num(fit.rExponent), num(rLimit), num(identity), remText);
  return r;
}

CheckResult determinism(const ExperimentConfig& config, SpectrumCache& cache) {
  CheckResult r{"determinism", false, 0.0, 0.0, "", 0.0};
  const FormMatrix& reference = cache.matrix(config.basisSize);
  const GalerkinBasis basis = GalerkinBasis::withSize(config.geom, config.basisSize);
  const QuadratureConfig quad = config.quadratureFor(basis);
  const Symbol symbol = Symbol::fractionalLog(config.params.s());
  double worst = 0.0;
  bool identical = true;
  for (unsigned threads : {1u, 3u}) {
    const FormMatrix again = assemble_form_matrix(basis, config.params, quad, symbol, threads);
    identical = identical && again.entries == reference.entries && again.provenance.digest == reference.provenance.digest;
    worst = std::max(worst, (again.entries - reference.entries).cwiseAbs().maxCoeff());
  }
  r.measured = worst;
  r.pass = identical;
  r.detail = fmt::format("max |entry difference| between assemblies with 1, 3 and {} threads (must be exactly 0)",
                         resolve_thread_count(0));
  return r;
}

json bound_report_json(const BoundReport& b) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"k", b.k},
              {"lower_bound", b.lowerBound},
              {"regime", to_string(b.regime)},
              {"upper_leading", opt(b.upperLeading)},
              {"weyl_k", opt(b.weylK)},
              {"weyl_sum", opt(b.weylSum)},
              {"computed_sum", opt(b.computedSum)}};
}

}  // namespace

const std::vector<std::string>& verification_check_names() {
  static const std::vector<std::string> names{
      "closed_form_vs_quadrature", "bathtub_oracle", "psi_optimization",   "karamata_tauberian",
      "classical_limit",           "derivative_oracle",      "lower_bound_sandwich", "positivity_threshold_check",
      "ritz_monotonicity",         "upper_bound_trend",      "planewave_probe",    "determinism"};
  return names;
}

bool VerificationReport::allPass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json VerificationReport::toJson(const std::string& generatedAt) const {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["all_pass"] = allPass();
  json checkList = json::array();
  json timings = json::object();
  for (const auto& c : checks) {
    checkList.push_back(
        {{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    timings[c.name] = c.seconds;
  }
  doc["checks"] = checkList;
  json rows = json::array();
  for (const auto& b : perK) rows.push_back(bound_report_json(b));
  doc["per_k"] = rows;
  doc["metadata"] = {{"config", config}, {"version", kVersion}, {"timings", timings}, {"generated_at", generatedAt}};
  return doc;
}

json strip_volatile(json report) {
  if (report.contains("metadata")) {
    report["metadata"].erase("timings");
    report["metadata"].erase("generated_at");
  }
  return report;
}

VerificationReport run_verification(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  if (config.params.n() != 1 || !config.geom.isBox()) {
    throw std::invalid_argument("the verification suite runs on one-dimensional boxes (n = 1)");
  }
  SpectrumCache cache(config);
  VerificationReport report;
  report.config = to_json(config);

  const std::vector<std::function<CheckResult()>> suite{
      [] { return closed_form_vs_quadrature(); },
      [&] { return bathtub_oracle(config.seed); },
      [&] { return psi_optimization(config.seed); },
      [] { return karamata_tauberian(); },
      [&] { return classical_limit(config); },
      [&] { return derivative_oracle(config); },
      [&] { return lower_bound_sandwich(config, cache); },
      [&] { return positivity_threshold_check(config, cache); },
      [&] { return ritz_monotonicity(config); },
      [&] { return upper_bound_trend(config, cache); },
      [&] { return planewave_probe(config); },
      [&] { return determinism(config, cache); },
  };
  for (const auto& check : suite) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result = check();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << fmt::format("[{}] {} measured={} tolerance={} ({:.2f} s)\n", result.pass ? "PASS" : "FAIL", result.name,
                       num(result.measured), num(result.tolerance), result.seconds);
    report.checks.push_back(std::move(result));
  }

  const auto& ev = cache.eigenvalues(config.basisSize);
  double sum = 0.0;
  for (long long k = 1; k <= config.kMax; ++k) {
    sum += ev[static_cast<std::size_t>(k - 1)];
    report.perK.push_back(make_bound_report(config.params, config.geom, k, sum));
  }
  return report;
}

}  // namespace speclog
