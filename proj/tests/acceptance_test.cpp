// One line per acceptance criterion; exit status is nonzero when any criterion fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "speclog/harness.hpp"

namespace {

struct Criterion {
  const char* check;
  double budgetSeconds;  // 0: runtime accounted to the previous criterion
};

constexpr std::array<Criterion, 11> kCriteria{{
    {"closed_form_vs_quadrature", 5},
    {"bathtub_oracle", 30},
    {"psi_optimization", 5},
    {"karamata_tauberian", 20},
    {"classical_limit", 120},
    {"derivative_oracle", 120},
    {"lower_bound_sandwich", 180},
    {"positivity_threshold_check", 0},
    {"ritz_monotonicity", 240},
    {"upper_bound_trend", 900},
    {"planewave_probe", 300},
}};

const speclog::CheckResult* find(const speclog::VerificationReport& report, const std::string& name) {
  for (const auto& c : report.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  try {
    const speclog::ExperimentConfig config = speclog::load_config(SPECLOG_DEFAULT_CONFIG);
    std::ostringstream firstLog, secondLog;
    const auto t0 = clock::now();
    const speclog::VerificationReport first = speclog::run_verification(config, firstLog);
    const auto t1 = clock::now();
    const speclog::VerificationReport second = speclog::run_verification(config, secondLog);
    const auto t2 = clock::now();
    std::cerr << firstLog.str();

    int failures = 0;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
      const Criterion& crit = kCriteria[i];
      const speclog::CheckResult* c = find(first, crit.check);
      if (!c) {
        std::cout << fmt::format("criterion {:2d} {}: FAIL (check missing from report)\n", i + 1, crit.check);
        ++failures;
        continue;
      }
      double seconds = c->seconds;
      if (crit.budgetSeconds > 0 && i + 1 < kCriteria.size() && kCriteria[i + 1].budgetSeconds == 0) {
        if (const auto* next = find(first, kCriteria[i + 1].check)) seconds += next->seconds;
      }
      const bool inBudget = crit.budgetSeconds == 0 || seconds <= crit.budgetSeconds;
      const bool pass = c->pass && inBudget;
      failures += pass ? 0 : 1;
      const std::string budget =
          crit.budgetSeconds > 0 ? fmt::format("{:.2f} s of {:.0f} s", seconds, crit.budgetSeconds) : "time counted above";
      std::cout << fmt::format("criterion {:2d} {}: {} measured={:.6g} tolerance={:.6g} ({}){} | {}\n", i + 1, crit.check,
                               pass ? "PASS" : "FAIL", c->measured, c->tolerance, budget,
                               inBudget ? "" : " over budget", c->detail);
    }

    // Determinism: the in-run reassembly comparison plus two full runs producing identical reports.
    const speclog::CheckResult* det = find(first, "determinism");
    const std::string a = speclog::strip_volatile(first.toJson("first")).dump(2);
    const std::string b = speclog::strip_volatile(second.toJson("second")).dump(2);
    const bool identical = a == b;
    const bool detPass = det && det->pass && identical;
    failures += detPass ? 0 : 1;
    std::cout << fmt::format(
        "criterion 12 determinism: {} reassembly={} reports_identical={} ({:.2f} s and {:.2f} s suite runs)\n",
        detPass ? "PASS" : "FAIL", det && det->pass ? "bitwise" : "differs", identical ? "yes" : "no",
        std::chrono::duration<double>(t1 - t0).count(), std::chrono::duration<double>(t2 - t1).count());

    std::cout << fmt::format("{} of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cout << "acceptance suite aborted: " << e.what() << '\n';
    return 2;
  }
}
