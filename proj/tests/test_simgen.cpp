#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "grouplife/io.hpp"
#include "grouplife/simgen.hpp"
#include "test_support.hpp"

using namespace grouplife;
namespace gt = grouplife::testing;

namespace {

// log T minus the known fixed part of the linear predictor, per group.
std::vector<std::vector<double>> residuals(const GroundTruthBundle& bundle, const RegressionParams& truth) {
  std::vector<std::vector<double>> out;
  for (const auto& group : bundle.dataset.groups()) {
    auto& r = out.emplace_back();
    for (const auto& o : group.observations) r.push_back(std::log(o.time) - linear_predictor(truth, o.covariates, 0.0));
  }
  return out;
}

}  // namespace

TEST(Simulate, VarianceDecomposition) {
  const double euler_gamma = 0.57721566490153286;
  for (ErrorKind error : {ErrorKind::lognormal, ErrorKind::weibull}) {
    auto spec = ScenarioSpec::defaults(Scenario::S3, error, 2000, 20, 17);
    spec.censoring_time = 1e300;
    const auto bundle = simulate(spec);
    EXPECT_EQ(bundle.censored_fraction, 0.0);
    const auto r = residuals(bundle, spec.truth);
    const double noise_var = error == ErrorKind::lognormal ? 1.0 : M_PI * M_PI / 6.0;
    const double noise_mean = error == ErrorKind::lognormal ? 0.0 : -euler_gamma;
    const double sigma = spec.truth.sigma;

    std::vector<double> group_means, within;
    std::vector<double> all_log_t;
    for (const auto& g : r) {
      const double m = gt::mean(g);
      group_means.push_back(m);
      for (double v : g) within.push_back(v - m);
    }
    for (const auto& group : bundle.dataset.groups()) {
      for (const auto& o : group.observations) all_log_t.push_back(std::log(o.time));
    }
    const double within_var = gt::variance(within) * 20.0 / 19.0;
    EXPECT_NEAR(within_var, sigma * sigma * noise_var, 0.05 * sigma * sigma * noise_var);
    const double between = spec.continuous.sd * spec.continuous.sd + sigma * sigma * noise_var / 20.0;
    EXPECT_NEAR(gt::variance(group_means), between, 0.1 * between);
    EXPECT_NEAR(gt::mean(group_means), spec.continuous.mean + sigma * noise_mean, 0.05);
    // Two standard-normal covariates with slopes +-0.5 add 0.5 to the total.
    const double total = 0.5 + spec.continuous.sd * spec.continuous.sd + sigma * sigma * noise_var;
    EXPECT_NEAR(gt::variance(all_log_t), total, 0.05 * total);
  }
}

TEST(Simulate, MembershipFrequency) {
  auto spec = ScenarioSpec::defaults(Scenario::S1, ErrorKind::lognormal, 20000, 1, 3);
  const auto bundle = simulate(spec);
  ASSERT_EQ(bundle.memberships.size(), 20000u);
  double first = 0.0;
  for (std::size_t i = 0; i < bundle.memberships.size(); ++i) {
    first += bundle.memberships[i] == 0 ? 1.0 : 0.0;
    ASSERT_EQ(bundle.true_w[i], spec.atoms[static_cast<std::size_t>(bundle.memberships[i])]);
  }
  EXPECT_NEAR(first / 20000.0, 0.35, 4.0 * std::sqrt(0.35 * 0.65 / 20000.0));
}

TEST(Simulate, CensoringFractionFallsWithCensoringTime) {
  for (ErrorKind error : {ErrorKind::lognormal, ErrorKind::weibull}) {
    auto spec = ScenarioSpec::defaults(Scenario::S2, error, 50, 10, 4);
    double previous = 1.0;
    for (double c : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
      spec.censoring_time = c;
      const auto bundle = simulate(spec);
      EXPECT_LE(bundle.censored_fraction, previous);
      previous = bundle.censored_fraction;
      for (const auto& g : bundle.dataset.groups()) {
        for (const auto& o : g.observations) {
          ASSERT_LE(o.time, c);
          if (!o.event) ASSERT_EQ(o.time, c);
        }
      }
    }
  }
}

TEST(Simulate, DefaultCensoringNearCalibration) {
  for (ErrorKind error : {ErrorKind::lognormal, ErrorKind::weibull}) {
    for (Scenario s : {Scenario::S1, Scenario::S2, Scenario::S3}) {
      const auto bundle = simulate(ScenarioSpec::defaults(s, error, 100, 20, 1));
      EXPECT_GT(bundle.censored_fraction, 0.08) << to_string(s);
      EXPECT_LT(bundle.censored_fraction, 0.22) << to_string(s);
    }
  }
}

TEST(Simulate, DegenerateComponentsReproduceAtoms) {
  auto s1 = ScenarioSpec::defaults(Scenario::S1, ErrorKind::weibull, 30, 4, 8);
  auto s2 = ScenarioSpec::defaults(Scenario::S2, ErrorKind::weibull, 30, 4, 8);
  s2.components = {{-1.0, 0.0}, {1.0, 0.0}};
  s2.censoring_time = s1.censoring_time;
  const auto a = simulate(s1);
  const auto b = simulate(s2);
  EXPECT_EQ(a.true_w, b.true_w);
  EXPECT_EQ(a.memberships, b.memberships);
  EXPECT_EQ(dataset_fingerprint(a.dataset), dataset_fingerprint(b.dataset));
}

TEST(Simulate, Deterministic) {
  const auto spec = ScenarioSpec::defaults(Scenario::S3, ErrorKind::lognormal, 12, 5, 99);
  EXPECT_EQ(dataset_fingerprint(simulate(spec).dataset), dataset_fingerprint(simulate(spec).dataset));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(dataset_fingerprint(simulate(spec).dataset), dataset_fingerprint(simulate(other).dataset));
}

TEST(Simulate, LatentDrawDoesNotDependOnM) {
  const auto a = simulate(ScenarioSpec::defaults(Scenario::S2, ErrorKind::lognormal, 15, 3, 5));
  const auto b = simulate(ScenarioSpec::defaults(Scenario::S2, ErrorKind::lognormal, 15, 30, 5));
  EXPECT_EQ(a.true_w, b.true_w);
}

TEST(Simulate, SpecValidation) {
  auto spec = ScenarioSpec::defaults(Scenario::S1, ErrorKind::lognormal, 5, 5);
  EXPECT_DOUBLE_EQ(spec.latent_mean(), 0.3);
  spec.proportion = 1.0;
  EXPECT_THROW(simulate(spec), std::invalid_argument);
  spec = ScenarioSpec::defaults(Scenario::S1, ErrorKind::lognormal, 0, 5);
  EXPECT_THROW(simulate(spec), std::invalid_argument);
  spec = ScenarioSpec::defaults(Scenario::S2, ErrorKind::lognormal, 5, 5);
  spec.components.pop_back();
  EXPECT_THROW(simulate(spec), std::invalid_argument);
  spec = ScenarioSpec::defaults(Scenario::S3, ErrorKind::lognormal, 5, 5);
  spec.censoring_time = 0.0;
  EXPECT_THROW(simulate(spec), std::invalid_argument);
}

TEST(Scenarios, ParseAndDefaults) {
  for (Scenario s : {Scenario::S1, Scenario::S2, Scenario::S3}) EXPECT_EQ(parse_scenario(to_string(s)), s);
  EXPECT_THROW(parse_scenario("S4"), std::invalid_argument);
  const auto specs = default_scenarios(ErrorKind::weibull);
  ASSERT_EQ(specs.size(), 12u);
  std::set<std::tuple<int, std::size_t, std::size_t>> seen;
  for (const auto& s : specs) {
    EXPECT_EQ(s.error, ErrorKind::weibull);
    seen.insert({static_cast<int>(s.scenario), s.n, s.M});
  }
  EXPECT_EQ(seen.size(), 12u);
}
