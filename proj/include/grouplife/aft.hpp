#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grouplife/random.hpp"

namespace grouplife {

/// Distribution of the log-time error term.
enum class ErrorKind { lognormal, weibull };

std::string_view to_string(ErrorKind kind);
ErrorKind parse_error_kind(std::string_view text);

struct Observation {
  double time = 1.0;  // failure or censoring time
  bool event = true;  // false = right-censored
  std::vector<double> covariates;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Group {
  std::string id;
  std::vector<Observation> observations;

  friend bool operator==(const Group&, const Group&) = default;
};

/// Right-censored lifetimes grouped by the unit's group. Validated on construction.
class GroupedDataset {
 public:
  GroupedDataset() = default;
  explicit GroupedDataset(std::vector<Group> groups);

  [[nodiscard]] const std::vector<Group>& groups() const { return groups_; }
  [[nodiscard]] std::size_t group_count() const { return groups_.size(); }
  [[nodiscard]] std::size_t covariate_count() const { return covariate_count_; }
  [[nodiscard]] std::size_t observation_count() const;
  [[nodiscard]] double censored_fraction() const;

  friend bool operator==(const GroupedDataset&, const GroupedDataset&) = default;

 private:
  std::vector<Group> groups_;
  std::size_t covariate_count_ = 0;
};

/// Log-time regression parameters: log T = beta0 + beta . x + W + sigma * eta.
struct RegressionParams {
  double beta0 = 0.0;
  std::vector<double> beta;
  double sigma = 1.0;
};

double linear_predictor(const RegressionParams& params, std::span<const double> x, double w);

/// log f (event) or log R (censored) for a unit with linear predictor `lp`.
/// Weibull: rate exp(-lp / sigma), shape 1 / sigma.
inline double log_likelihood_term(ErrorKind kind, double lp, double sigma, double log_time,
                                  bool event) {
  const double z = (log_time - lp) / sigma;
  if (kind == ErrorKind::lognormal) {
    if (event) return -0.91893853320467274178 - std::log(sigma) - log_time - 0.5 * z * z;
    return log_standard_normal_survival(z);
  }
  const double ez = std::exp(z);
  if (event) return -std::log(sigma) - log_time + z - ez;
  return -ez;
}

double unit_log_likelihood(const RegressionParams& params, ErrorKind kind,
                           const Observation& obs, double w);

double group_log_likelihood(const RegressionParams& params, ErrorKind kind,
                            std::span<const Observation> observations, double w);

/// Survival probability R(t) at covariates x and latent effect w.
double reliability(const RegressionParams& params, ErrorKind kind, double t,
                   std::span<const double> x, double w);

/// Survival probability for an already-computed linear predictor.
double reliability_at(ErrorKind kind, double t, double lp, double sigma);

/// The lifetime law implied by (kind, lp, sigma) as a randkit distribution.
DistSpec lifetime_law(ErrorKind kind, double lp, double sigma);

}  // namespace grouplife
