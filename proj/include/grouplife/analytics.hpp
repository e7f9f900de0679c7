#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grouplife/aft.hpp"
#include "grouplife/sampler.hpp"

namespace grouplife {

/// Deviance information criterion with the latent W_i treated as parameters.
struct DicResult {
  double dic = 0.0;
  double mean_deviance = 0.0;     // D-bar
  double deviance_at_mean = 0.0;  // D-hat
  double p_d = 0.0;               // D-bar - D-hat
};

/// Conditional-focus DIC. D-hat plugs in posterior means of beta0, beta, sigma
/// and W_i; for the discrete structure each W_i is its modal atom.
DicResult dic(const Trace& trace, const GroupedDataset& data);

/// Posterior mean of every W_i.
std::vector<double> posterior_mean_w(const Trace& trace);

/// (1/n) sum_i |E[W_i] - true_w_i|.
double posterior_mean_error(const Trace& trace, std::span<const double> true_w);

/// posterior_mean_error on the identifiable group intercepts beta0 + W_i.
double group_intercept_error(const Trace& trace, std::span<const double> true_w, double true_beta0);

struct KaplanMeierCurve {
  std::vector<double> times;     // distinct observed times, ascending
  std::vector<double> survival;  // S-hat just after each time

  /// Right-continuous step evaluation; 1 before the first time.
  [[nodiscard]] double at(double t) const;
};

/// Product-limit estimator over (time, event) pairs.
KaplanMeierCurve kaplan_meier(std::span<const std::pair<double, bool>> observations);
KaplanMeierCurve kaplan_meier(const GroupedDataset& data);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitReport {
  double level = 0.95;
  std::size_t sample_count = 0;
  std::vector<ParameterSummary> parameters;
  std::optional<DicResult> dic;
  std::vector<BlockRate> acceptance;
};

/// Linear interpolation between order statistics, h = (N - 1) * prob.
double empirical_quantile(std::span<const double> sorted, double prob);

/// Posterior mean and central credible interval of every trace column
/// except the log-likelihood and the membership indices.
FitReport summarize_trace(const Trace& trace, double level = 0.95);

/// Posterior predictive reliability at x_new over t_grid: the average over
/// retained samples of R(t) with W integrated over the sampled latent law.
/// Discrete laws are summed exactly; continuous and mixed laws use
/// `latent_draws` fresh W per sample from substreams of `seed`.
std::vector<double> predicted_reliability_curve(const Trace& trace, ErrorKind kind,
                                                std::span<const double> x_new,
                                                std::span<const double> t_grid,
                                                int latent_draws = 32, std::uint64_t seed = 1);

}  // namespace grouplife
