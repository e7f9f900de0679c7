#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "grouplife/sampler.hpp"
#include "grouplife/simgen.hpp"

namespace grouplife {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitNumerical = 3 };

/// Resolved settings for every command. Defaults, then the config file, then
/// command-line flags; each layer goes through `set`.
struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  // simulate
  Scenario scenario = Scenario::S1;
  ErrorKind spec = ErrorKind::lognormal;
  std::size_t n = 10;
  std::size_t M = 5;
  double censoring_time = 0.0;  // 0 = scenario default
  double true_beta0 = 1.0;
  std::vector<double> true_beta{0.5, -0.5};
  double true_sigma = 0.3;
  double proportion = 0.35;
  std::vector<double> atoms{-1.0, 1.0};
  std::vector<double> component_mu{-1.0, 1.0};
  std::vector<double> component_sd{0.3, 0.3};
  double latent_mu = 0.0;
  double latent_sd = 0.7;

  // fit
  std::filesystem::path data;
  LatentKind latent = LatentKind::none;
  std::size_t K = 2;
  ChainConfig chain;
  PriorConfig priors;
  bool recenter = true;
  bool standardize = false;

  // predict
  std::filesystem::path fit;
  std::vector<double> x_new;
  std::vector<double> t_grid;
  std::filesystem::path holdout;
  int predictive_draws = 32;

  /// Apply one `key = value` setting; throws std::invalid_argument on a bad key or value.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
  [[nodiscard]] std::string to_text() const;
  /// Parse a flat `key = value` document (`#` starts a comment).
  void load_text(const std::string& text);

  [[nodiscard]] ScenarioSpec scenario_spec() const;
  [[nodiscard]] ModelSpec model_spec() const;
};

/// Run the command line; output and diagnostics go to the given streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grouplife
