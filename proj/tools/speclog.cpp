#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "speclog/harness.hpp"

namespace {

constexpr int kInfrastructureError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral bounds and Galerkin eigenvalues of the fractional-logarithmic Laplacian"};
  app.set_version_flag("--version", speclog::kVersion);
  app.require_subcommand(1);

  std::string configPath;
  std::optional<std::string> outDir;
  std::optional<std::uint64_t> seed;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configPath, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", outDir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "seed for randomized checks (overrides seed)");
    return sub;
  };
  CLI::App* bounds = add("bounds", "tabulate lower/upper bounds and asymptotic laws for k = 1..kmax");
  CLI::App* solve = add("solve", "assemble (or load) the form matrix and write the Ritz spectrum");
  CLI::App* verify = add("verify", "run the acceptance suite and write a JSON report");
  CLI::App* asymptotics = add("asymptotics", "tabulate Tauberian sum ratios and Weyl-sum consistency");
  CLI::App* cutoff = add("cutoff", "run the cutoff plane-wave probe and fit the remainder scaling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInfrastructureError;
  }

  try {
    speclog::ExperimentConfig config = speclog::load_config(configPath);
    if (outDir) config.outputDir = *outDir;
    if (seed) config.seed = *seed;
    config.validate();
    if (bounds->parsed()) return speclog::cmd_bounds(config, std::cout);
    if (solve->parsed()) return speclog::cmd_solve(config, std::cout);
    if (verify->parsed()) return speclog::cmd_verify(config, std::cout);
    if (asymptotics->parsed()) return speclog::cmd_asymptotics(config, std::cout);
    if (cutoff->parsed()) return speclog::cmd_cutoff(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfrastructureError;
  }
  return kInfrastructureError;
}
