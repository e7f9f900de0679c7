#include "grouplife/aft.hpp"

#include <stdexcept>

namespace grouplife {

std::string_view to_string(ErrorKind kind) {
  return kind == ErrorKind::lognormal ? "lognormal" : "weibull";
}

ErrorKind parse_error_kind(std::string_view text) {
  if (text == "lognormal") return ErrorKind::lognormal;
  if (text == "weibull") return ErrorKind::weibull;
  throw std::invalid_argument("unknown error specification '" + std::string(text) +
                              "' (expected lognormal or weibull)");
}

GroupedDataset::GroupedDataset(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) throw std::invalid_argument("dataset has no groups");
  covariate_count_ = groups_.front().observations.empty()
                         ? 0
                         : groups_.front().observations.front().covariates.size();
  for (const auto& group : groups_) {
    if (group.observations.empty()) {
      throw std::invalid_argument("group '" + group.id + "' has no observations");
    }
    for (const auto& obs : group.observations) {
      if (!(obs.time > 0.0) || !std::isfinite(obs.time)) {
        throw std::invalid_argument("group '" + group.id + "': time must be positive");
      }
      if (obs.covariates.size() != covariate_count_) {
        throw std::invalid_argument("group '" + group.id + "': covariate length mismatch");
      }
    }
  }
}

std::size_t GroupedDataset::observation_count() const {
  std::size_t total = 0;
  for (const auto& group : groups_) total += group.observations.size();
  return total;
}

double GroupedDataset::censored_fraction() const {
  std::size_t censored = 0;
  for (const auto& group : groups_) {
    for (const auto& obs : group.observations) censored += obs.event ? 0 : 1;
  }
  const auto total = observation_count();
  return total == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(total);
}

double linear_predictor(const RegressionParams& params, std::span<const double> x, double w) {
  if (x.size() != params.beta.size()) {
    throw std::invalid_argument("linear_predictor: covariate length " + std::to_string(x.size()) +
                                " does not match coefficient length " +
                                std::to_string(params.beta.size()));
  }
  double lp = params.beta0 + w;
  for (std::size_t j = 0; j < x.size(); ++j) lp += params.beta[j] * x[j];
  return lp;
}

double unit_log_likelihood(const RegressionParams& params, ErrorKind kind,
                           const Observation& obs, double w) {
  const double lp = linear_predictor(params, obs.covariates, w);
  return log_likelihood_term(kind, lp, params.sigma, std::log(obs.time), obs.event);
}

double group_log_likelihood(const RegressionParams& params, ErrorKind kind,
                            std::span<const Observation> observations, double w) {
  double total = 0.0;
  for (const auto& obs : observations) total += unit_log_likelihood(params, kind, obs, w);
  return total;
}

double reliability_at(ErrorKind kind, double t, double lp, double sigma) {
  if (!(t > 0.0)) return 1.0;
  const double z = (std::log(t) - lp) / sigma;
  if (kind == ErrorKind::lognormal) return standard_normal_cdf(-z);
  return std::exp(-std::exp(z));
}

double reliability(const RegressionParams& params, ErrorKind kind, double t,
                   std::span<const double> x, double w) {
  return reliability_at(kind, t, linear_predictor(params, x, w), params.sigma);
}

DistSpec lifetime_law(ErrorKind kind, double lp, double sigma) {
  if (kind == ErrorKind::lognormal) return LogNormal(lp, sigma);
  return Weibull(std::exp(-lp / sigma), 1.0 / sigma);
}

}  // namespace grouplife
