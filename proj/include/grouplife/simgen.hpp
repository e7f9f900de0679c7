#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "grouplife/aft.hpp"
#include "grouplife/latent.hpp"
#include "grouplife/random.hpp"

namespace grouplife {

/// Ground-truth latent structure of a simulation scenario.
///   S1 - two atoms (discrete latent effect)
///   S2 - two normal components (mixed latent effect)
///   S3 - one normal law (continuous latent effect)
enum class Scenario { S1, S2, S3 };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

struct ScenarioSpec {
  Scenario scenario = Scenario::S1;
  ErrorKind error = ErrorKind::lognormal;
  std::size_t n = 100;  // groups
  std::size_t M = 20;   // units per group
  RegressionParams truth{1.0, {0.5, -0.5}, 0.3};
  double proportion = 0.35;  // probability of subpopulation 1 (S1, S2)
  std::vector<double> atoms{-1.0, 1.0};                 // S1
  std::vector<NormalLaw> components{{-1.0, 0.3}, {1.0, 0.3}};  // S2
  NormalLaw continuous{0.0, 0.7};                        // S3
  double censoring_time = 13.0;
  std::uint64_t seed = 1;

  /// Artifact defaults with a censoring time calibrated for about 15% censoring.
  static ScenarioSpec defaults(Scenario scenario, ErrorKind error, std::size_t n, std::size_t M,
                               std::uint64_t seed = 1);
  void validate() const;
  /// Mean of the ground-truth latent law.
  [[nodiscard]] double latent_mean() const;
};

struct LatentDraw {
  std::vector<double> w;
  std::vector<int> memberships;  // 0-based subpopulation; empty for S3
};

struct GroundTruthBundle {
  GroupedDataset dataset;
  std::vector<double> true_w;
  std::vector<int> memberships;
  double censored_fraction = 0.0;
};

/// Draw the true latent effect of each group.
LatentDraw generate_groundtruth_w(const ScenarioSpec& spec, const RandomStream& rs);

/// Forward-simulate lifetimes from the AFT model with the given latent
/// effects, then apply Type-I censoring at spec.censoring_time.
GroundTruthBundle generate_dataset(const ScenarioSpec& spec, const LatentDraw& latent,
                                   const RandomStream& rs);

/// Latent draw plus dataset from spec.seed.
GroundTruthBundle simulate(const ScenarioSpec& spec);

/// {S1, S2, S3} x {(100, 20), (100, 5), (10, 20), (10, 5)} for one error kind.
std::vector<ScenarioSpec> default_scenarios(ErrorKind error);

}  // namespace grouplife
